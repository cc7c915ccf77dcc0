#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>

#include "bkern/distance.hpp"
#include "bkern/envelope.hpp"
#include "bkern/error.hpp"
#include "bkern/flow.hpp"

using namespace bkern;
using std::numbers::pi;

namespace {

const ChartPoint kBase{0, {0.3, 0.1}};

std::optional<ErrorKind> kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

EnvelopeSolution sphere_envelope(double c, double lambda, int res) {
  EnvelopeOptions opt;
  opt.override_seshadri_boundary = true;
  return solve_envelope(SurfaceModel::projective_line(c), kBase, lambda, res, opt);
}

}  // namespace

TEST_CASE("default level grid") {
  auto sol = sphere_envelope(8.0, 2.0, 64);
  auto t = default_t_grid(sol.G);
  REQUIRE(t.size() == 40);
  for (std::size_t i = 1; i < t.size(); ++i) CHECK(t[i] > t[i - 1]);
  CHECK(t.back() == doctest::Approx(-0.05));
  CHECK(t.front() < -3.0);
  CHECK(kind_of([&] { default_t_grid(sol.G, 5); }) == ErrorKind::Usage);
  auto square = psi_field(SurfaceModel::projective_line(2.0), kBase, 32).front();
  CHECK(kind_of([&] { default_t_grid(square); }) == ErrorKind::Usage);
}

TEST_CASE("profile of the boundary envelope on the unit sphere") {
  // G = log sin^2(d/2): A(t) = 4 pi e^t and sigma^2 = A (4 pi - A)
  auto sol = sphere_envelope(2.0, 2.0, 128);
  auto p = sublevel_profile(sol.G, default_t_grid(sol.G));
  for (std::size_t i = 0; i < p.t.size(); ++i) {
    double A = 4 * pi * std::exp(p.t[i]);
    CHECK(p.A[i] == doctest::Approx(A).epsilon(0.01));
    CHECK(p.sigma[i] * p.sigma[i] == doctest::Approx(A * (4 * pi - A)).epsilon(0.02));
    CHECK(p.dAdt[i] == doctest::Approx(A).epsilon(0.02));
  }
  CHECK(p.ell_hat == doctest::Approx(4 * pi).epsilon(0.01));
  CHECK(!p.touches_open_edge);
  auto bz = bz_check(p, 2.0);
  CHECK(bz.pass);
  CHECK(std::abs(bz.worst_relative_margin) < 0.02);
}

TEST_CASE("profile of an interior envelope") {
  // levels just below 0 need the free boundary resolved: 256 as in the pipelines
  auto sol = sphere_envelope(8.0, 2.0, 256);
  auto p = sublevel_profile(sol.G, default_t_grid(sol.G));
  double s_star = std::atanh(-0.5);
  double kappa = 2 * s_star + 4 * std::log(2 * std::cosh(s_star));
  CHECK(p.ell_hat == doctest::Approx(16 * pi * std::exp(-kappa)).epsilon(0.01));
  CHECK(p.ell_stderr < 1e-2 * p.ell_hat);
  CHECK(bz_check(p, 2.0).pass);

  auto mono = monotonicity_check(p, 2.0);
  CHECK(mono.nondecreasing);
  CHECK(mono.limit_bound == doctest::Approx(4 * pi));
  CHECK(mono.limit_ok);
  CHECK(mono.pass);
  for (std::size_t i = 1; i < p.t.size(); ++i)
    CHECK(std::exp(-p.t[i]) * p.A[i] >= std::exp(-p.t[i - 1]) * p.A[i - 1] * (1 - 0.01));

  auto ot = ot_bound(p, 2.0);
  CHECK(ot.bound == doctest::Approx(0.5 / p.ell_hat));
  CHECK(ot.bound <= 7 / (16 * pi));

  auto chain = chain_audit(sol, p);
  REQUIRE(chain.size() == p.t.size());
  for (const auto& row : chain) {
    CHECK(row.pass);
    CHECK(row.rhs == doctest::Approx((4 * pi - p.A[&row - chain.data()]) / 2));
  }
}

TEST_CASE("transport bound preconditions") {
  SublevelProfile p;
  p.t = {-3, -2, -1};
  p.A = {1, 2, 3};
  p.sigma = p.dAdt = {1, 1, 1};
  p.ell_hat = 10.0;
  p.ell_stderr = 0.5;
  CHECK(kind_of([&] { ot_bound(p, 1.0); }) == ErrorKind::HypothesisViolation);
  CHECK(kind_of([&] { ot_bound(p, 0.5); }) == ErrorKind::HypothesisViolation);
  CHECK(kind_of([&] { ot_bound(p, 2.0); }) == ErrorKind::UnreliableLimit);
  p.ell_stderr = 0.05;
  CHECK(ot_bound(p, 3.0).bound == doctest::Approx((2.0 / 3.0) / 10.0));
}

TEST_CASE("monotonicity flags a decreasing profile") {
  SublevelProfile p;
  p.t = {-3, -2, -1};
  p.A = {std::exp(-3.0), 0.5 * std::exp(-2.0), std::exp(-1.0)};
  p.ell_hat = 1.0;
  auto m = monotonicity_check(p, 2.0);
  CHECK(!m.nondecreasing);
  CHECK(!m.pass);
  CHECK(m.worst_ratio == doctest::Approx(0.5));
  p.A[1] = std::exp(-2.0);
  p.ell_hat = 20.0;
  auto m2 = monotonicity_check(p, 2.0);
  CHECK(m2.nondecreasing);
  CHECK(!m2.limit_ok);
}

TEST_CASE("isoperimetric check on caps and flat disks") {
  auto s = SurfaceModel::projective_line(2.0);
  auto psi = psi_patch(s, kBase, 256);
  for (double r : {0.3, 0.8, 1.2, 1.5}) {
    double level = psi_of_distance(r);
    auto iso = iso_check(s, psi, level, 1.0);
    CHECK(iso.area == doctest::Approx(2 * pi * (1 - std::cos(r))).epsilon(0.01));
    CHECK(iso.sigma == doctest::Approx(2 * pi * std::sin(r)).epsilon(0.01));
    CHECK(iso.ratio == doctest::Approx(1.0).epsilon(0.01));
    CHECK(iso.pass);
  }
  CHECK(kind_of([&] { iso_check(s, psi, psi_of_distance(2.0), 1.0); }) == ErrorKind::HypothesisViolation);
  CHECK(kind_of([&] { iso_check(s, psi, psi_of_distance(0.5), 0.5); }) == ErrorKind::HypothesisViolation);

  auto t = SurfaceModel::square_torus(13);
  auto tpsi = psi_patch(t, kBase, 256);
  for (double r : {0.5, 1.0, 2.0}) {
    auto iso = iso_check(t, tpsi, psi_of_distance(r), 0.0);
    CHECK(iso.area == doctest::Approx(pi * r * r).epsilon(0.01));
    CHECK(iso.lhs >= 4 * pi * iso.area * (1 - 0.02));
    CHECK(iso.pass);
  }
}

TEST_CASE("profile output") {
  auto sol = sphere_envelope(8.0, 2.0, 64);
  auto p = sublevel_profile(sol.G, default_t_grid(sol.G));
  auto bz = bz_check(p, 2.0);
  std::ostringstream os;
  write_profile_csv(os, p, &bz);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,A,sigma,dAdt,margin");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 4);
  }
  CHECK(rows == int(p.t.size()));
  std::ostringstream plot;
  write_plot_file(plot, {1, 2}, {3, 4});
  CHECK(plot.str().find("1 3") != std::string::npos);
}
