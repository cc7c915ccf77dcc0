#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bkern/bergman.hpp"
#include "bkern/distance.hpp"
#include "bkern/error.hpp"

using namespace bkern;
using std::numbers::pi;

namespace {

// dim H0 / int MA_{m phi}: constant kernel value on homogeneous models
double homogeneous_value(int dim, double degree, int m) { return dim / (2 * pi * degree * m); }

std::vector<ChartPoint> random_points(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<ChartPoint> pts;
  for (int k = 0; k < n; ++k) pts.push_back({k % 2, {0.7 * u(rng), 0.7 * u(rng)}});
  return pts;
}

}  // namespace

TEST_CASE("round sphere kernels equal dim / volume") {
  for (double c : {2.0, 8.0}) {
    auto s = SurfaceModel::projective_line(c);
    auto q = build_quadrature(s, 128);
    for (int m : {1, 4, 32}) {
      KernelEvaluator B(SectionBasis::build(s, m, Twist::Plain), q);
      KernelEvaluator K(SectionBasis::build(s, m, Twist::Canonical), q);
      double b = homogeneous_value(int(m * c) + 1, c, m);
      double k = homogeneous_value(int(m * c) - 1, c, m);
      for (const auto& p : random_points(6, 5)) {
        CHECK(B.value(p) == doctest::Approx(b).epsilon(1e-8));
        CHECK(K.value(p) == doctest::Approx(k).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("reference values of the round models") {
  auto s2 = SurfaceModel::projective_line(2.0);
  ChartPoint x{0, {0.3, 0.1}};
  CHECK(kernel_K_ratio(s2, 1, x, 256) == doctest::Approx(1 / (4 * pi)).epsilon(1e-10));
  CHECK(kernel_B(s2, 1, x, 256) == doctest::Approx(3 / (4 * pi)).epsilon(1e-10));
  auto s8 = SurfaceModel::projective_line(8.0);
  CHECK(kernel_B(s8, 1, x, 128) == doctest::Approx(9 / (16 * pi)).epsilon(1e-10));
  CHECK(kernel_K_ratio(s8, 1, x, 128) == doctest::Approx(7 / (16 * pi)).epsilon(1e-10));
  auto t = SurfaceModel::square_torus(8);
  CHECK(kernel_B(t, 1, x, 128) == doctest::Approx(1 / (2 * pi)).epsilon(1e-4));
}

TEST_CASE("trace identity on perturbed and lattice models") {
  auto sp = SurfaceModel::projective_line(4.0, Expr::parse("0.3*x*exp(-r2)"));
  auto tk = SurfaceModel::torus({3.0, 0.0}, {0.0, 2.5}, 5.0, Expr::parse("0.05*cos(2*pi*x/3)"));
  for (const auto* s : {&sp, &tk}) {
    auto q = build_quadrature(*s, 128);
    for (auto tw : {Twist::Plain, Twist::Canonical}) {
      KernelEvaluator k(SectionBasis::build(*s, 2, tw), q);
      CHECK(k.trace_integral(q) == doctest::Approx(k.basis().dimension()).epsilon(1e-3));
      CHECK(k.factor_residual() < 1e-12);
      CHECK(k.condition_number() >= 1.0);
    }
  }
}

TEST_CASE("kernel is the supremum over random sections") {
  auto s = SurfaceModel::projective_line(4.0, Expr::parse("0.3*x*exp(-r2)"));
  auto q = build_quadrature(s, 96);
  auto basis = SectionBasis::build(s, 1, Twist::Plain);
  KernelEvaluator k(basis, q);
  std::mt19937 rng(17);
  std::normal_distribution<double> n;
  for (const auto& x : random_points(3, 9)) {
    double bx = k.value(x);
    auto w = basis.weighted_values(x);
    double best = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      Eigen::VectorXcd u(basis.dimension());
      for (int j = 0; j < u.size(); ++j) u[j] = {n(rng), n(rng)};
      double num = std::norm(w.cwiseProduct(u).sum());
      double den = inner_product(basis, u, basis, u, q).real();
      best = std::max(best, num / den);
    }
    CHECK(best <= bx * (1 + 1e-8));
    CHECK(best > 0.3 * bx);
  }
}

TEST_CASE("chart independence at overlap points") {
  auto s = SurfaceModel::projective_line(4.0, Expr::parse("0.3*x*exp(-r2)"));
  auto q = build_quadrature(s, 96);
  for (auto tw : {Twist::Plain, Twist::Canonical}) {
    KernelEvaluator k(SectionBasis::build(s, 1, tw), q);
    for (cplx z : {cplx(0.95, 0.2), cplx(-0.5, 0.9)}) {
      ChartPoint p0{0, z};
      CHECK(k.value(p0) == doctest::Approx(k.value(s.to_chart(p0, 1))).epsilon(1e-8));
    }
  }
}

TEST_CASE("serial and parallel kernel paths agree") {
  auto s = SurfaceModel::projective_line(2.0);
  auto sb = sample_basis(SectionBasis::build(s, 8, Twist::Plain), build_quadrature(s, 128));
  auto a = gram_matrix(sb, Execution::Serial), b = gram_matrix(sb, Execution::Parallel);
  CHECK((a - b).norm() <= 1e-12 * a.norm());
  KernelEvaluator k(SectionBasis::build(s, 8, Twist::Plain), build_quadrature(s, 64));
  auto nodes = sample_nodes(s, 12);
  auto vs = k.values(nodes, Execution::Serial), vp = k.values(nodes, Execution::Parallel);
  for (std::size_t i = 0; i < vs.size(); ++i) CHECK(vs[i] == vp[i]);
}

TEST_CASE("kernel extremes report the minimum node") {
  auto s = SurfaceModel::projective_line(4.0, Expr::parse("0.3*x*exp(-r2)"));
  KernelEvaluator k(SectionBasis::build(s, 1, Twist::Plain), build_quadrature(s, 64));
  auto nodes = sample_nodes(s, 10);
  auto ex = kernel_extremes(k, nodes);
  CHECK(ex.min <= ex.max);
  CHECK(k.value(ex.argmin) == doctest::Approx(ex.min));
}

TEST_CASE("Tian table on the round sphere") {
  auto s = SurfaceModel::projective_line(2.0);
  auto rows = tian_table(s, {8, 1, 4, 2}, 128);
  REQUIRE(rows.size() == 4);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    int m = rows[i].m;
    if (i > 0) CHECK(m > rows[i - 1].m);
    double exact = (2.0 * m + 1) / (4 * pi * m);
    CHECK(rows[i].min_B == doctest::Approx(exact).epsilon(1e-6));
    CHECK(rows[i].max_B == doctest::Approx(exact).epsilon(1e-6));
    CHECK(rows[i].deviation_B == doctest::Approx(1.0 / (2 * m)).epsilon(1e-6));
    REQUIRE(rows[i].min_ratio.has_value());
    CHECK(*rows[i].min_ratio == doctest::Approx((2.0 * m - 1) / (4 * pi * m)).epsilon(1e-6));
  }
  CHECK_THROWS_AS(tian_table(s, {}, 64), Error);
}

TEST_CASE("Tian table on the square torus") {
  auto t = SurfaceModel::square_torus(8);
  auto rows = tian_table(t, {1, 2, 3, 4}, 96);
  CHECK(rows[0].min_B > 0);
  CHECK(std::isfinite(rows[0].max_B));
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].deviation_B <= rows[i - 1].deviation_B + 1e-9);
  // ripple of the flat theta kernel: 2 exp(-pi N / 2) at level N = 8
  CHECK(rows[0].deviation_B == doctest::Approx(2 * std::exp(-pi * 8 / 2)).epsilon(0.05));
}

TEST_CASE("deformed kernel curve for the psi envelope") {
  auto s = SurfaceModel::projective_line(2.0);
  ChartPoint x{0, {0.3, 0.1}};
  PointFunction G = [&](const ChartPoint& p) { return psi_of_distance(model_distance(s, x, p)); };
  std::vector<double> ts = {-6, -4, -3, -2, -1.5, -1, -0.5, 0};
  auto rows = deformed_kernel_curve(s, x, G, 2.0, ts, 128);
  REQUIRE(rows.size() == ts.size());
  CHECK(rows.back().value == doctest::Approx(kernel_K_ratio(s, 1, x, 128)).epsilon(1e-10));
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].value >= rows[i - 1].value * (1 - 1e-9));
  // radial weights keep the monomials orthogonal: e^t K = 1 / (4 pi (2 - e^t))
  for (const auto& r : rows) {
    if (r.t >= -4) CHECK(r.value == doctest::Approx(1 / (4 * pi * (2 - std::exp(r.t)))).epsilon(1e-4));
  }
  CHECK(rows.front().value >= 1 / (8 * pi));
}
