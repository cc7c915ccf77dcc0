#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <optional>
#include <random>

#include "bkern/distance.hpp"
#include "bkern/error.hpp"
#include "bkern/geodesic.hpp"

using namespace bkern;
using std::numbers::pi;

namespace {

double brute_torus_distance(const SurfaceModel& s, cplx a, cplx b) {
  cplx w1 = s.omega1(), w2 = s.omega2();
  double best = 1e300;
  for (int i = -4; i <= 4; ++i)
    for (int j = -4; j <= 4; ++j) best = std::min(best, std::abs(b - a + double(i) * w1 + double(j) * w2));
  return best * std::sqrt(2.0 * metric_density(s, {0, a}));
}

std::optional<ErrorKind> kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("front propagation on the unit sphere") {
  auto s = SurfaceModel::projective_line(2.0);
  ChartPoint x{0, {0.0, 0.0}};
  auto field = distance_field(s, x, 128);
  REQUIRE(field.charts.size() == 2);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    cplx z(u(rng), u(rng));
    if (std::abs(z) < 0.1) continue;
    double exact = 2 * std::atan(std::abs(z));
    CHECK(field.at({0, z}) == doctest::Approx(exact).epsilon(0.01));
    CHECK(field.at({1, z}) == doctest::Approx(pi - exact).epsilon(0.01));
  }
}

TEST_CASE("front propagation on a flat torus") {
  auto s = SurfaceModel::torus({3.0, 0.0}, {0.0, 2.5}, 5.0);
  ChartPoint x{0, {0.4, 0.7}};
  auto field = distance_field(s, x, 128);
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    cplx z(3.0 * u(rng), 2.5 * u(rng));
    double exact = brute_torus_distance(s, x.z, z);
    if (exact < 0.3) continue;
    CHECK(field.at({0, z}) == doctest::Approx(exact).epsilon(0.01));
    CHECK(refined_distance(s, x, {0, z}, field.at({0, z})) == doctest::Approx(exact).epsilon(1e-9));
  }
}

TEST_CASE("refined distance on a perturbed sphere is symmetric") {
  auto s = SurfaceModel::projective_line(8.0, Expr::parse("0.2*exp(-r2)"));
  ChartPoint a{0, {0.2, 0.1}}, b{0, {-0.4, 0.5}};
  double guess = distance_field(s, a, 96).at(b);
  double dab = refined_distance(s, a, b, guess), dba = refined_distance(s, b, a, guess);
  CHECK(dab == doctest::Approx(dba).epsilon(1e-5));
  CHECK(dab == doctest::Approx(guess).epsilon(0.02));
}

TEST_CASE("psi of distance") {
  CHECK(psi_of_distance(pi) == doctest::Approx(0.0));
  CHECK(psi_of_distance(4.0) == 0.0);
  CHECK(psi_of_distance(pi / 3) == doctest::Approx(std::log(0.25)));
  for (double d = 0.1; d < pi; d += 0.1) CHECK(psi_of_distance(d) < psi_of_distance(d + 0.05));
}

TEST_CASE("comparison margin on the models") {
  ChartPoint x{0, {0.3, 0.1}};
  auto sphere = hessian_comparison_check(SurfaceModel::projective_line(2.0), x, 1.0, 128);
  CHECK(sphere.min_ratio >= -1e-3);
  CHECK(sphere.pass);
  CHECK(sphere.nodes_checked > 1000);
  CHECK(sphere.nodes_excluded_pole > 0);
  auto big = hessian_comparison_check(SurfaceModel::projective_line(8.0), x, 4.0, 128);
  CHECK(big.min_ratio >= -1e-3);
  auto flat = hessian_comparison_check(SurfaceModel::square_torus(8), x, 1.0, 128);
  CHECK(flat.min_ratio > 0.0);
  CHECK(flat.pass);
}

TEST_CASE("comparison hypotheses") {
  ChartPoint x{0, {0.3, 0.1}};
  auto small = SurfaceModel::projective_line(1.0);
  CHECK(kind_of([&] { hessian_comparison_check(small, x, 1.0, 64); }) == ErrorKind::HypothesisViolation);
  CHECK(kind_of([&] { psi_field(small, x, 64); }) == ErrorKind::HypothesisViolation);
  CHECK(kind_of([&] { psi_patch(small, x, 64); }) == ErrorKind::HypothesisViolation);
  auto t2 = SurfaceModel::square_torus(2);
  CHECK(kind_of([&] { psi_patch(t2, x, 64); }) == ErrorKind::HypothesisViolation);
}

TEST_CASE("psi on the cylinder and the torus cell") {
  auto s = SurfaceModel::projective_line(2.0);
  ChartPoint x{0, {0.3, 0.1}};
  auto f = psi_patch(s, x, 64);
  CHECK(f.patch.kind() == PatchKind::Cylinder);
  const auto& g = f.patch.grid();
  for (int i = 0; i < g.nx; i += 7)
    for (int j = 0; j < g.ny; j += 5) {
      double d = model_distance(s, x, f.patch.node_point(i, j));
      CHECK(f.at_node(i, j) == doctest::Approx(psi_of_distance(d)).epsilon(1e-9));
    }
  CHECK(f.cap_top_value > -1e-3);
  CHECK(f.cap_top_value <= 0.0);

  auto big = SurfaceModel::projective_line(8.0);
  auto h = psi_patch(big, x, 64, 2.0);
  for (int i = 0; i < g.nx; i += 9) {
    double d = model_distance(big, x, h.patch.node_point(i, 3));
    CHECK(h.at_node(i, 3) == doctest::Approx(psi_of_distance(d / std::sqrt(2.0))).epsilon(1e-9));
  }

  auto t = SurfaceModel::square_torus(13);
  auto tf = psi_patch(t, x, 64);
  CHECK(tf.patch.kind() == PatchKind::TorusCell);
  CHECK(tf.values[0] == -1e300);
  CHECK(tf.at_node(32, 32) <= 0.0);
}
