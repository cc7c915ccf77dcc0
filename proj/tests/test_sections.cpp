#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "bkern/bergman.hpp"
#include "bkern/error.hpp"
#include "bkern/sections.hpp"

using namespace bkern;
using std::numbers::pi;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::Usage;
}

double max_offdiag_ratio(const Eigen::MatrixXcd& G) {
  double off = 0, diag = 0;
  for (int i = 0; i < G.rows(); ++i)
    for (int j = 0; j < G.cols(); ++j) {
      if (i == j) diag = std::max(diag, std::abs(G(i, j)));
      else off = std::max(off, std::abs(G(i, j)));
    }
  return off / diag;
}

}  // namespace

TEST_CASE("quadrature integrates area and sphere moments") {
  for (double c : {2.0, 8.0}) {
    auto s = SurfaceModel::projective_line(c);
    auto q = build_quadrature(s, 64);
    CHECK(integrate_area(s, q, [](const ChartPoint&) { return 1.0; }) ==
          doctest::Approx(2 * pi * c).epsilon(1e-12));
  }
  auto s = SurfaceModel::projective_line(2.0);
  auto q = build_quadrature(s, 64);
  double m2 = integrate_area(s, q, [](const ChartPoint& p) {
    double z = to_unit_sphere(p)[2];
    return z * z;
  });
  CHECK(m2 == doctest::Approx(4 * pi / 3).epsilon(1e-12));
  for (double D : {8.0, 13.0}) {
    auto t = SurfaceModel::square_torus(D);
    auto qt = build_quadrature(t, 32);
    CHECK(integrate_area(t, qt, [](const ChartPoint&) { return 1.0; }) == doctest::Approx(2 * pi * D));
  }
  CHECK(kind_of([&] { build_quadrature(s, 8); }) == ErrorKind::Usage);
}

TEST_CASE("section space dimensions") {
  auto s2 = SurfaceModel::projective_line(2.0);
  CHECK(SectionBasis::build(s2, 3, Twist::Plain).dimension() == 7);
  CHECK(SectionBasis::build(s2, 3, Twist::Canonical).dimension() == 5);
  auto t = SurfaceModel::square_torus(8);
  CHECK(SectionBasis::build(t, 2, Twist::Plain).dimension() == 16);
  CHECK(SectionBasis::build(t, 2, Twist::Canonical).dimension() == 16);
  CHECK(kind_of([] { SectionBasis::build(SurfaceModel::projective_line(1.0), 1, Twist::Canonical); }) ==
        ErrorKind::EmptySpace);
  CHECK(kind_of([] { SectionBasis::build(SurfaceModel::projective_line(2.5), 1, Twist::Plain); }) ==
        ErrorKind::Unsupported);
}

TEST_CASE("round models have diagonal Gram matrices") {
  for (auto tw : {Twist::Plain, Twist::Canonical}) {
    auto s = SurfaceModel::projective_line(2.0);
    auto b = SectionBasis::build(s, 4, tw);
    auto G = gram_matrix(sample_basis(b, build_quadrature(s, 128)));
    CHECK(max_offdiag_ratio(G) < 1e-10);
    auto t = SurfaceModel::square_torus(8);
    auto bt = SectionBasis::build(t, 1, tw);
    auto Gt = gram_matrix(sample_basis(bt, build_quadrature(t, 128)));
    CHECK(max_offdiag_ratio(Gt) < 1e-10);
  }
}

TEST_CASE("inner product matches the Gram form and rejects mismatched bases") {
  auto s = SurfaceModel::projective_line(2.0);
  auto q = build_quadrature(s, 64);
  auto b = SectionBasis::build(s, 2, Twist::Plain);
  auto G = gram_matrix(sample_basis(b, q));
  std::mt19937 rng(3);
  std::normal_distribution<double> n;
  Eigen::VectorXcd u(b.dimension()), v(b.dimension());
  for (int k = 0; k < b.dimension(); ++k) u[k] = {n(rng), n(rng)}, v[k] = {n(rng), n(rng)};
  cplx direct = inner_product(b, u, b, v, q);
  cplx viaG = v.dot(G * u);
  CHECK(std::abs(direct - viaG) < 1e-10 * std::abs(viaG));
  auto bc = SectionBasis::build(s, 2, Twist::Canonical);
  Eigen::VectorXcd w = Eigen::VectorXcd::Ones(bc.dimension());
  CHECK(kind_of([&] { inner_product(b, u, bc, w, q); }) == ErrorKind::Usage);
  auto b3 = SectionBasis::build(s, 3, Twist::Plain);
  Eigen::VectorXcd w3 = Eigen::VectorXcd::Ones(b3.dimension());
  CHECK(kind_of([&] { inner_product(b, u, b3, w3, q); }) == ErrorKind::Usage);
}

TEST_CASE("weighted section moduli are chart independent") {
  auto s = SurfaceModel::projective_line(4.0, Expr::parse("0.1*exp(-r2)"));
  for (auto tw : {Twist::Plain, Twist::Canonical}) {
    auto b = SectionBasis::build(s, 1, tw);
    for (cplx z : {cplx(0.9, 0.3), cplx(-0.6, 0.8)}) {
      ChartPoint p0{0, z};
      ChartPoint p1 = s.to_chart(p0, 1);
      auto v0 = b.weighted_values(p0), v1 = b.weighted_values(p1);
      // plain: |s|^2 e^{-phi} is a function; canonical: |f|^2 e^{-phi} is a density like MA
      double r0 = v0.squaredNorm(), r1 = v1.squaredNorm();
      if (tw == Twist::Canonical) r0 /= b.monge_ampere(p0), r1 /= b.monge_ampere(p1);
      CHECK(r0 == doctest::Approx(r1).epsilon(1e-8));
    }
  }
}

TEST_CASE("serial and parallel sampling agree") {
  auto s = SurfaceModel::square_torus(8);
  auto b = SectionBasis::build(s, 2, Twist::Plain);
  auto q = build_quadrature(s, 64);
  auto a = sample_basis(b, q, Execution::Serial);
  auto c = sample_basis(b, q, Execution::Parallel);
  CHECK((a.rows - c.rows).norm() == 0.0);
}

TEST_CASE("kink refinement keeps the area and refines only crossing cells") {
  auto s = SurfaceModel::projective_line(2.0);
  auto q = build_quadrature(s, 64);
  ChartPoint x{0, {0.3, 0.1}};
  auto field = [&](const ChartPoint& p) { return model_distance(s, x, p); };
  int refined = 0;
  auto r = refine_near_level(s, q, field, 1.0, 2, &refined);
  CHECK(refined > 0);
  CHECK(refined < int(q.cells.size()) / 4);
  CHECK(r.size() > q.size());
  CHECK(integrate_area(s, r, [](const ChartPoint&) { return 1.0; }) == doctest::Approx(4 * pi).epsilon(1e-12));
  // area of a geodesic ball of radius 1: 2 pi (1 - cos 1)
  auto inside = [&](const ChartPoint& p) { return field(p) < 1.0 ? 1.0 : 0.0; };
  double coarse = integrate_area(s, q, inside), fine = integrate_area(s, r, inside);
  double exact = 2 * pi * (1 - std::cos(1.0));
  CHECK(std::abs(fine - exact) < std::abs(coarse - exact) + 1e-12);
  CHECK(fine == doctest::Approx(exact).epsilon(2e-3));
}

TEST_CASE("basis csv has one row per node and section") {
  auto s = SurfaceModel::projective_line(2.0);
  auto q = build_quadrature(s, 16);
  auto b = SectionBasis::build(s, 1, Twist::Plain);
  std::ostringstream os;
  write_basis_csv(os, b, q);
  std::string text = os.str();
  auto lines = std::count(text.begin(), text.end(), '\n');
  CHECK(lines == long(q.size() * b.dimension() + 1));
}
