#include "bkern/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <ostream>

#include <json.hpp>

#include "bkern/error.hpp"
#include "bkern/sections.hpp"

namespace bkern {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPoleValue = -1e300;
constexpr double kContactTol = 1e-12;
// warm-start sweeps on a level seeded from the next coarser grid
constexpr int kRefineSweeps = 10;

using Triplet = Eigen::Triplet<double>;

// radial cutoff: 1 on [0, r1], 0 beyond r2, C^2 quintic in between
struct Cutoff {
  double r1, r2;
  void eval(double r, double& c, double& dc, double& ddc) const {
    if (r <= r1) {
      c = 1.0, dc = 0.0, ddc = 0.0;
      return;
    }
    if (r >= r2) {
      c = 0.0, dc = 0.0, ddc = 0.0;
      return;
    }
    double L = r2 - r1, t = (r - r1) / L;
    double p = t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
    double dp = 30.0 * t * t * (1.0 - t) * (1.0 - t);
    double ddp = 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t);
    c = 1.0 - p;
    dc = -dp / L;
    ddc = -ddp / (L * L);
  }
};

void add_face(std::vector<Triplet>& t, std::size_t a, std::size_t b, double coef) {
  t.emplace_back(a, a, -coef);
  t.emplace_back(b, b, -coef);
  t.emplace_back(a, b, coef);
  t.emplace_back(b, a, coef);
}

void finish(EnvelopeSolution& sol, const LcpResult& r, const Eigen::VectorXd& scale_rows) {
  sol.sweeps = r.sweeps;
  sol.active_set_iterations = r.active_set_iterations;
  sol.obstacle_residual = r.obstacle_residual;
  sol.dual_residual = r.dual_residual;
  sol.complementarity_residual = r.complementarity_residual;
  sol.residual_history = r.history;
  sol.converged = r.converged;
  sol.state.resize(sol.G.values.size());
  double open_res = 0.0;
  for (std::size_t k = 0; k < sol.G.values.size(); ++k) {
    bool contact = std::abs(sol.G.values[k]) < kContactTol;
    sol.state[k] = contact ? NodeState::Contact : NodeState::Open;
    if (!contact) open_res = std::max(open_res, std::abs(r.w[k]) / scale_rows[k]);
  }
  sol.open_measure_residual = open_res;
}

EnvelopeSolution solve_cylinder(const SurfaceModel& surface, const ChartPoint& x, double lambda,
                                int n_theta, const EnvelopeOptions& opt) {
  if (n_theta % 2 != 0) throw Error(ErrorKind::Usage, "envelope resolution must be even");
  auto patch = ConformalPatch::cylinder(surface, x, n_theta, opt.half_length);
  const auto& g = patch.grid();
  const auto& W = patch.node_density();
  const double hs = g.hx, ht = g.hy;
  const int ns = g.nx;
  const std::size_t n = g.size();

  std::vector<Triplet> trip;
  Eigen::VectorXd b(n), vol(n);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < ns; ++i) {
      std::size_t k = g.index(i, j);
      double as = (i == 0 || i == ns - 1) ? 0.5 * hs : hs;
      double mass = W[k] * as;
      if (i == 0) mass += 0.5 * W[k];
      if (i == ns - 1) mass += 0.5 * W[k];
      vol[k] = mass * ht;
      b[k] = -(2.0 / lambda) * mass * ht;
      if (i == 0) b[k] += 2.0 * ht;
      if (i + 1 < ns) add_face(trip, k, g.index(i + 1, j), ht / hs);
      add_face(trip, k, g.index(i, g.wrap_y(j + 1)), as / ht);
    }
  }
  Eigen::SparseMatrix<double, Eigen::RowMajor> K(n, n);
  K.setFromTriplets(trip.begin(), trip.end());

  LcpProblem p;
  p.M = -K;
  p.q = -b;
  p.color.resize(n);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < ns; ++i) p.color[g.index(i, j)] = std::uint8_t((i + j) % 2);

  std::optional<Eigen::VectorXd> init;
  if (n_theta >= 64 && (n_theta / 2) % 2 == 0) {
    auto coarse = solve_cylinder(surface, x, lambda, n_theta / 2, opt);
    Eigen::VectorXd v0(n);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < ns; ++i)
        v0[g.index(i, j)] = std::max(0.0, -interpolate(coarse.G.patch.grid(), coarse.G.values, g.x(i), g.y(j)));
    init = std::move(v0);
  }
  LcpOptions so = opt.solver;
  if (init) so.max_sweeps = std::min(so.max_sweeps, kRefineSweeps);
  LcpResult r = solve_lcp(p, so, init ? &*init : nullptr);

  EnvelopeSolution sol;
  sol.pole = x;
  sol.lambda = lambda;
  std::vector<double> G(n);
  for (std::size_t k = 0; k < n; ++k) G[k] = -r.v[k];
  sol.G = PatchField{patch, G};
  sol.G.cap_bottom_value = kPoleValue;
  double top = 0.0;
  for (int j = 0; j < g.ny; ++j) top = std::min(top, G[g.index(ns - 1, j)]);
  sol.G.cap_top_value = top < -kContactTol ? top : 0.0;
  sol.bottom_flux.resize(g.ny);
  for (int j = 0; j < g.ny; ++j) sol.bottom_flux[j] = 2.0 - W[g.index(0, j)] / lambda;

  sol.regular.resize(n);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < ns; ++i) {
      std::size_t k = g.index(i, j);
      ChartPoint q = patch.node_point(i, j);
      try {
        cplx z = surface.to_chart(q, x.chart).z;
        sol.regular[k] = G[k] - std::log(std::norm(z - x.z));
      } catch (const Error&) {
        sol.regular[k] = std::numeric_limits<double>::quiet_NaN();
      }
    }
  }
  finish(sol, r, vol);
  return sol;
}

EnvelopeSolution solve_torus(const SurfaceModel& surface, const ChartPoint& x, double lambda, int N,
                             const EnvelopeOptions& opt) {
  if (N % 2 != 0) throw Error(ErrorKind::Usage, "envelope resolution must be even");
  auto patch = ConformalPatch::torus_cell(surface, x, N);
  const auto& g = patch.grid();
  const auto& W = patch.node_density();
  const double hx = g.hx, hy = g.hy;
  const std::size_t n = g.size();
  double side = std::min(std::abs(surface.omega1()), std::abs(surface.omega2()));
  Cutoff chi{0.15 * side, 0.4 * side};

  std::vector<double> logterm(n), obs(n);
  Eigen::VectorXd b(n), vol(n);
  double obs_max = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      std::size_t k = g.index(i, j);
      double dx = std::min(i, g.nx - i) * hx, dy = std::min(j, g.ny - j) * hy;
      double r = std::hypot(dx, dy);
      vol[k] = hx * hy;
      double source = -(2.0 / lambda) * W[k];  // omega density is W = 2g
      if (k == 0) {
        logterm[k] = 0.0;
      } else {
        double L = 2.0 * std::log(r);
        double c, dc, ddc;
        chi.eval(r, c, dc, ddc);
        logterm[k] = c * L;
        obs[k] = -c * L;
        obs_max = std::max(obs_max, obs[k]);
        source -= ddc * L + dc * (L + 4.0) / r;
      }
      b[k] = source * hx * hy;
    }
  }
  obs[0] = obs_max + 100.0;

  std::vector<Triplet> trip;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      std::size_t k = g.index(i, j);
      add_face(trip, k, g.index(g.wrap_x(i + 1), j), hy / hx);
      add_face(trip, k, g.index(i, g.wrap_y(j + 1)), hx / hy);
    }
  }
  Eigen::SparseMatrix<double, Eigen::RowMajor> K(n, n);
  K.setFromTriplets(trip.begin(), trip.end());
  Eigen::Map<Eigen::VectorXd> ob(obs.data(), Eigen::Index(n));

  LcpProblem p;
  p.M = -K;
  p.q = K * ob - b;
  p.color.resize(n);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) p.color[g.index(i, j)] = std::uint8_t((i + j) % 2);

  std::optional<Eigen::VectorXd> init;
  if (N >= 64 && (N / 2) % 2 == 0) {
    auto coarse = solve_torus(surface, x, lambda, N / 2, opt);
    Eigen::VectorXd v0(n);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        std::size_t k = g.index(i, j);
        v0[k] = std::max(0.0, obs[k] - interpolate(coarse.G.patch.grid(), coarse.regular, g.x(i), g.y(j)));
      }
    init = std::move(v0);
  }
  LcpOptions so = opt.solver;
  if (init) so.max_sweeps = std::min(so.max_sweeps, kRefineSweeps);
  LcpResult r = solve_lcp(p, so, init ? &*init : nullptr);

  EnvelopeSolution sol;
  sol.pole = surface.normalize(x);
  sol.lambda = lambda;
  sol.pole_node = 0;
  sol.cutoff_inner = chi.r1;
  sol.cutoff_outer = chi.r2;
  sol.regular.resize(n);
  std::vector<double> G(n);
  for (std::size_t k = 0; k < n; ++k) {
    sol.regular[k] = obs[k] - r.v[k];
    G[k] = k == 0 ? kPoleValue : logterm[k] + sol.regular[k];
  }
  sol.G = PatchField{patch, G};
  finish(sol, r, vol);
  return sol;
}

// int_{G<0} omega. Near the free boundary G vanishes quadratically, so
// F = -sqrt(-G) is linear across it; F is extended into the contact nodes next
// to the open set by linear extrapolation and the zero sublevel of F is taken.
double open_set_volume(const EnvelopeSolution& sol) {
  // Signed distance-like field F with F < 0 on the open set. Near the contact set
  // G ~ -(a/2) d^2 with a = 2 W / lambda, so d = |grad G| / a there; this is
  // insensitive to a constant offset in G. Contact nodes continue F along the
  // normal, ring by ring.
  const auto& g = sol.G.patch.grid();
  const auto& G = sol.G.values;
  const auto& W = sol.G.patch.node_density();
  const std::size_t n = G.size();
  auto inside = [&](int i, int j) {
    return (g.periodic_x || (i >= 0 && i < g.nx)) && (g.periodic_y || (j >= 0 && j < g.ny));
  };
  auto idx = [&](int i, int j) { return g.index(g.wrap_x(i), g.wrap_y(j)); };
  auto is_open = [&](int i, int j) { return inside(i, j) && sol.state[idx(i, j)] == NodeState::Open; };
  auto is_pole = [&](std::size_t k) { return G[k] <= -1e299; };

  std::vector<std::uint8_t> near(n, 0);  // open nodes within two cells of contact
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (sol.state[g.index(i, j)] != NodeState::Contact) continue;
      for (int dj = -2; dj <= 2; ++dj)
        for (int di = -2; di <= 2; ++di)
          if (is_open(i + di, j + dj)) near[idx(i + di, j + dj)] = 1;
    }

  // one-sided where the centred stencil leaves the grid or hits the pole
  auto derivative = [&](int i, int j, int di, int dj, double h) {
    std::size_t k = g.index(i, j);
    bool up = inside(i + di, j + dj) && !is_pole(idx(i + di, j + dj));
    bool dn = inside(i - di, j - dj) && !is_pole(idx(i - di, j - dj));
    if (up && dn) return (G[idx(i + di, j + dj)] - G[idx(i - di, j - dj)]) / (2 * h);
    if (up) return (G[idx(i + di, j + dj)] - G[k]) / h;
    if (dn) return (G[k] - G[idx(i - di, j - dj)]) / h;
    return 0.0;
  };

  std::vector<double> F(n, 1.0), gx(n, 0.0), gy(n, 0.0);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      std::size_t k = g.index(i, j);
      if (sol.state[k] != NodeState::Open) continue;
      if (is_pole(k)) {
        F[k] = -1e300;
        continue;
      }
      double a = 2.0 * W[k] / sol.lambda;
      if (near[k]) {
        gx[k] = derivative(i, j, 1, 0, g.hx);
        gy[k] = derivative(i, j, 0, 1, g.hy);
        F[k] = -std::hypot(gx[k], gy[k]) / a;
      } else {
        F[k] = -std::sqrt(-2.0 * G[k] / a);
      }
    }

  // two rings: the discrete contact set may start up to a cell inside the open set
  std::vector<std::uint8_t> source(near);
  for (int ring = 0; ring < 2; ++ring) {
    std::vector<double> nF = F, ngx = gx, ngy = gy;
    std::vector<std::uint8_t> assigned(n, 0);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        std::size_t k = g.index(i, j);
        if (sol.state[k] != NodeState::Contact || source[k]) continue;
        double sum[2] = {0.0, 0.0}, sx = 0.0, sy = 0.0;
        int count[2] = {0, 0};  // axis, diagonal
        for (int dj = -1; dj <= 1; ++dj)
          for (int di = -1; di <= 1; ++di) {
            if ((di == 0 && dj == 0) || !inside(i - di, j - dj)) continue;
            std::size_t o = idx(i - di, j - dj);
            double norm = std::hypot(gx[o], gy[o]);
            if (!source[o] || norm <= 0.0) continue;
            double step = (di * g.hx * gx[o] + dj * g.hy * gy[o]) / norm;
            int kind = (di != 0 && dj != 0) ? 1 : 0;
            sum[kind] += F[o] + step;
            ++count[kind];
            sx += gx[o] / norm;
            sy += gy[o] / norm;
          }
        int use = count[0] > 0 ? 0 : 1;
        if (count[use] == 0) continue;
        nF[k] = sum[use] / count[use];
        ngx[k] = sx;
        ngy[k] = sy;
        assigned[k] = 1;
      }
    F = std::move(nF);
    gx = std::move(ngx);
    gy = std::move(ngy);
    for (std::size_t k = 0; k < n; ++k) source[k] = assigned[k];
  }

  PatchField f{sol.G.patch, std::move(F)};
  f.cap_bottom_value = sol.G.cap_bottom_value;
  f.cap_top_value = sol.G.cap_top_value < 0.0 ? -1.0 : 1.0;
  return sublevel_area(f, 0.0);
}

}  // namespace

int EnvelopeSolution::contact_count() const {
  return int(std::count(state.begin(), state.end(), NodeState::Contact));
}

SeshadriValue seshadri(const SurfaceModel& surface, int resolution) {
  auto q = build_quadrature(surface, resolution);
  double area = integrate_area(surface, q, [](const ChartPoint&) { return 1.0; });
  return {area / (2.0 * kPi), surface.degree()};
}

EnvelopeSolution solve_envelope(const SurfaceModel& surface, const ChartPoint& x, double lambda,
                                int resolution, const EnvelopeOptions& opt) {
  if (!(lambda > 0.0)) throw Error(ErrorKind::Usage, "lambda must be positive");
  double eps = seshadri(surface).value;
  bool boundary = std::abs(lambda - eps) <= 1e-6 * eps;
  if (lambda > eps && !boundary) {
    throw Error(ErrorKind::HypothesisViolation,
                "lambda = " + std::to_string(lambda) + " exceeds the Seshadri constant " + std::to_string(eps));
  }
  if (boundary && !opt.override_seshadri_boundary) {
    throw Error(ErrorKind::HypothesisViolation,
                "lambda equals the Seshadri constant; pass the boundary override to solve");
  }
  EnvelopeSolution sol = surface.is_projective_line()
                             ? solve_cylinder(surface, x, lambda, resolution, opt)
                             : solve_torus(surface, x, lambda, resolution, opt);
  sol.boundary_case = boundary;
  if (!sol.converged) {
    std::string hist;
    for (double h : sol.residual_history) hist += " " + std::to_string(h);
    throw Error(ErrorKind::SolverFailure, "envelope LCP did not converge; residual history:" + hist);
  }
  return sol;
}

MassAudit mass_audit(const EnvelopeSolution& sol) {
  MassAudit a;
  a.target = 2.0 * kPi * sol.lambda;
  const auto& patch = sol.G.patch;
  const auto& g = patch.grid();
  const auto& W = patch.node_density();
  const auto& G = sol.G.values;
  if (patch.kind() == PatchKind::Cylinder) {
    // disc below the face between nodes ih and ih + 1, near s = -S/2
    int ih = std::max(1, int(std::lround(-0.5 * g.x0 / g.hx)));
    double omega = 0.0, flux = 0.0;
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i <= ih; ++i) {
        double as = i == 0 ? 0.5 * g.hx : g.hx;
        omega += W[g.index(i, j)] * as * g.hy;
      }
      omega += 0.5 * W[g.index(0, j)] * g.hy;
      flux += (G[g.index(ih + 1, j)] - G[g.index(ih, j)]) / g.hx * g.hy;
    }
    a.pole_mass = omega + 0.5 * sol.lambda * flux;
  } else {
    int half = std::max(1, int(0.5 * sol.cutoff_inner / std::max(g.hx, g.hy)));
    const auto& h = sol.regular;
    auto in_box = [&](int i, int j) {
      int di = std::min(i, g.nx - i), dj = std::min(j, g.ny - j);
      return di <= half && dj <= half;
    };
    double omega = 0.0, flux = 0.0;
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        if (!in_box(i, j)) continue;
        std::size_t k = g.index(i, j);
        omega += W[k] * g.hx * g.hy;
        const int nb[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
        for (auto& d : nb) {
          int ii = g.wrap_x(i + d[0]), jj = g.wrap_y(j + d[1]);
          if (in_box(ii, jj)) continue;
          double coef = d[0] != 0 ? g.hy / g.hx : g.hx / g.hy;
          flux += coef * (h[g.index(ii, jj)] - h[k]);
        }
      }
    }
    a.pole_mass = omega + 0.5 * sol.lambda * (4.0 * kPi + flux);
  }
  a.open_volume = open_set_volume(sol);
  a.pole_ok = std::abs(a.pole_mass - a.target) <= 0.01 * a.target;
  a.volume_ok = std::abs(a.open_volume - a.target) <= 0.01 * a.target;
  return a;
}

PoleRegularity pole_regularity(const EnvelopeSolution& sol) {
  PoleRegularity pr;
  const auto& g = sol.G.patch.grid();
  std::vector<double> ring;
  double inc = 0.0;
  if (sol.G.patch.kind() == PatchKind::Cylinder) {
    for (int j = 0; j < g.ny; ++j) {
      ring.push_back(sol.regular[g.index(0, j)]);
      inc = std::max(inc, std::abs(sol.G.values[g.index(1, j)] - sol.G.values[g.index(0, j)]));
    }
  } else {
    for (int dj = -1; dj <= 1; ++dj) {
      for (int di = -1; di <= 1; ++di) {
        if (di == 0 && dj == 0) continue;
        std::size_t k = g.index(g.wrap_x(di), g.wrap_y(dj));
        ring.push_back(sol.regular[k]);
        std::size_t k2 = g.index(g.wrap_x(2 * di), g.wrap_y(2 * dj));
        inc = std::max(inc, std::abs(sol.G.values[k2] - sol.G.values[k]));
      }
    }
  }
  auto [lo, hi] = std::minmax_element(ring.begin(), ring.end());
  pr.oscillation = *hi - *lo;
  pr.grid_increment = inc;
  return pr;
}

std::string envelope_diagnostics_json(const EnvelopeSolution& sol, const MassAudit& audit) {
  nlohmann::ordered_json j;
  j["lambda"] = sol.lambda;
  j["boundary_case"] = sol.boundary_case;
  j["grid"] = {{"kind", sol.G.patch.kind() == PatchKind::Cylinder ? "cylinder" : "torus_cell"},
               {"nodes", sol.G.values.size()}};
  j["solver"] = {{"psor_sweeps", sol.sweeps},
                 {"active_set_iterations", sol.active_set_iterations},
                 {"converged", sol.converged},
                 {"residual_history", sol.residual_history}};
  j["residuals"] = {{"obstacle", sol.obstacle_residual},
                    {"positivity", sol.dual_residual},
                    {"complementarity", sol.complementarity_residual},
                    {"open_measure", sol.open_measure_residual}};
  j["active_set"] = {{"contact", sol.contact_count()},
                     {"open", int(sol.state.size()) - sol.contact_count()}};
  j["mass_audit"] = {{"pole_mass", audit.pole_mass},
                     {"open_volume", audit.open_volume},
                     {"target", audit.target},
                     {"pole_ok", audit.pole_ok},
                     {"volume_ok", audit.volume_ok}};
  return j.dump(2);
}

void write_envelope_csv(std::ostream& os, const EnvelopeSolution& sol) {
  os << "chart,re,im,value,state\n";
  os.precision(17);
  const auto& g = sol.G.patch.grid();
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      std::size_t k = g.index(i, j);
      ChartPoint p = sol.G.patch.node_point(i, j);
      os << p.chart << ',' << p.z.real() << ',' << p.z.imag() << ',' << sol.G.values[k] << ','
         << (sol.state[k] == NodeState::Contact ? "contact" : "open") << '\n';
    }
  }
}

}  // namespace bkern
