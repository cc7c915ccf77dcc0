#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "bkern/distance.hpp"
#include "bkern/envelope.hpp"
#include "bkern/error.hpp"

using namespace bkern;
using std::numbers::pi;

namespace {

const ChartPoint kBase{0, {0.3, 0.1}};

EnvelopeSolution boundary_sphere(int res) {
  EnvelopeOptions opt;
  opt.override_seshadri_boundary = true;
  return solve_envelope(SurfaceModel::projective_line(2.0), kBase, 2.0, res, opt);
}

std::optional<ErrorKind> kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

double max_gap(const PatchField& a, const PatchField& b, int skip = -1) {
  REQUIRE(a.values.size() == b.values.size());
  double m = 0.0;
  for (std::size_t k = 0; k < a.values.size(); ++k)
    if (int(k) != skip) m = std::max(m, std::abs(a.values[k] - b.values[k]));
  return m;
}

}  // namespace

TEST_CASE("Seshadri value equals the degree") {
  CHECK(seshadri(SurfaceModel::projective_line(2.0)).value == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(seshadri(SurfaceModel::projective_line(8.0, Expr::parse("0.2*exp(-r2)"))).value ==
        doctest::Approx(8.0).epsilon(1e-4));
  CHECK(seshadri(SurfaceModel::square_torus(13)).value == doctest::Approx(13.0).epsilon(1e-6));
}

TEST_CASE("boundary case reproduces psi on the round sphere") {
  auto sol = boundary_sphere(128);
  CHECK(sol.converged);
  CHECK(sol.boundary_case);
  CHECK(sol.G.patch.kind() == PatchKind::Cylinder);
  auto psi = psi_patch(SurfaceModel::projective_line(2.0), kBase, 128);
  CHECK(max_gap(sol.G, psi) <= 8e-4);
  auto audit = mass_audit(sol);
  CHECK(audit.target == doctest::Approx(4 * pi));
  CHECK(audit.pole_ok);
  CHECK(audit.volume_ok);
  CHECK(audit.open_volume == doctest::Approx(4 * pi).epsilon(0.01));
}

TEST_CASE("solver residuals") {
  auto sol = solve_envelope(SurfaceModel::projective_line(8.0), kBase, 2.0, 128);
  REQUIRE(sol.converged);
  CHECK(sol.obstacle_residual < 1e-8);
  CHECK(sol.dual_residual < 1e-8);
  CHECK(sol.complementarity_residual < 1e-8);
  CHECK(!sol.residual_history.empty());
  for (double v : sol.G.values) CHECK(v <= 1e-12);
}

TEST_CASE("radial profile on a large sphere") {
  // G'' = -4 sech^2 s with G' -> 2 at the pole and contact beyond tanh s* = -1/2
  auto sol = solve_envelope(SurfaceModel::projective_line(8.0), kBase, 2.0, 256);
  REQUIRE(sol.converged);
  const double ss = std::atanh(-0.5);
  auto exact = [ss](double s) {
    return s >= ss ? 0.0 : 2 * (ss - s) + 4 * (std::log(std::cosh(ss)) - std::log(std::cosh(s)));
  };
  const auto& g = sol.G.patch.grid();
  double worst = 0.0;
  for (int j = 0; j < g.ny; j += 16)
    for (int i = 0; i < g.nx; ++i) worst = std::max(worst, std::abs(sol.G.at_node(i, j) - exact(g.x(i))));
  CHECK(worst < 5e-3);
  for (int i = 0; i < g.nx; ++i) {
    double s = g.x(i);
    if (s > ss + 0.1) CHECK(sol.state[g.index(i, 0)] == NodeState::Contact);
    if (s < ss - 0.1) CHECK(sol.state[g.index(i, 0)] == NodeState::Open);
  }
  auto audit = mass_audit(sol);
  CHECK(audit.pole_ok);
  CHECK(audit.open_volume == doctest::Approx(4 * pi).epsilon(0.01));
  CHECK(audit.open_volume <= 0.5 * 16 * pi);
}

TEST_CASE("open volume is linear in lambda") {
  auto s = SurfaceModel::projective_line(8.0);
  double prev = 0.0;
  for (double lambda : {0.5, 1.0, 2.0}) {
    auto audit = mass_audit(solve_envelope(s, kBase, lambda, 128));
    CHECK(audit.open_volume == doctest::Approx(2 * pi * lambda).epsilon(0.01));
    CHECK(audit.open_volume > prev);
    prev = audit.open_volume;
  }
}

TEST_CASE("torus envelope") {
  auto t = SurfaceModel::square_torus(13);
  auto sol = solve_envelope(t, kBase, 4.0, 128);
  REQUIRE(sol.converged);
  CHECK(sol.G.patch.kind() == PatchKind::TorusCell);
  CHECK(sol.pole_node >= 0);
  CHECK(sol.G.values[sol.pole_node] == -1e300);
  auto audit = mass_audit(sol);
  CHECK(audit.target == doctest::Approx(8 * pi));
  CHECK(audit.pole_ok);
  CHECK(audit.volume_ok);
  auto reg = pole_regularity(sol);
  CHECK(reg.oscillation < 10 * reg.grid_increment);
}

TEST_CASE("envelope dominates admissible competitors") {
  auto s = SurfaceModel::projective_line(8.0);
  auto sol = solve_envelope(s, kBase, 2.0, 128);
  // psi of omega/4 has i ddbar psi >= -omega/8, admissible for lambda = 2
  auto psi = psi_patch(s, kBase, 128, 4.0);
  REQUIRE(psi.values.size() == sol.G.values.size());
  for (std::size_t k = 0; k < psi.values.size(); ++k) CHECK(sol.G.values[k] >= psi.values[k] - 1e-3);

  auto t = SurfaceModel::square_torus(13);
  auto tsol = solve_envelope(t, kBase, 2.0, 96);
  auto tpsi = psi_patch(t, kBase, 96);
  for (std::size_t k = 0; k < tpsi.values.size(); ++k)
    if (int(k) != tsol.pole_node) CHECK(tsol.G.values[k] >= tpsi.values[k] - 1e-3);
}

TEST_CASE("hypothesis failures") {
  auto s = SurfaceModel::projective_line(2.0);
  CHECK(kind_of([&] { solve_envelope(s, kBase, 2.5, 64); }) == ErrorKind::HypothesisViolation);
  CHECK(kind_of([&] { solve_envelope(s, kBase, 2.0, 64); }) == ErrorKind::HypothesisViolation);
  CHECK(kind_of([&] { solve_envelope(s, kBase, 0.0, 64); }) == ErrorKind::Usage);
  CHECK(kind_of([&] { solve_envelope(SurfaceModel::square_torus(8), kBase, 9.0, 64); }) ==
        ErrorKind::HypothesisViolation);
}

TEST_CASE("contact classification") {
  auto sol = solve_envelope(SurfaceModel::projective_line(8.0), kBase, 2.0, 64);
  int contacts = 0;
  for (std::size_t k = 0; k < sol.G.values.size(); ++k) {
    bool tie = std::abs(sol.G.values[k]) < 1e-12;
    CHECK((sol.state[k] == NodeState::Contact) == tie);
    contacts += tie;
  }
  CHECK(sol.contact_count() == contacts);
  CHECK(contacts > 0);
}

TEST_CASE("envelope outputs") {
  auto sol = solve_envelope(SurfaceModel::projective_line(8.0), kBase, 2.0, 32);
  std::ostringstream csv;
  write_envelope_csv(csv, sol);
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "chart,re,im,value,state");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == sol.G.values.size());

  auto j = nlohmann::json::parse(envelope_diagnostics_json(sol, mass_audit(sol)));
  for (const char* key : {"grid", "solver", "residuals", "active_set", "mass_audit"}) CHECK(j.contains(key));
  CHECK(j["active_set"]["contact"].get<int>() == sol.contact_count());
  CHECK(j["solver"]["converged"].get<bool>() == sol.converged);
}
