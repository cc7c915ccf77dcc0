#include "bkern/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "bkern/error.hpp"

namespace bkern {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kFitLevels = 10;

PatchField exp_half(const PatchField& G) {
  PatchField F = G;
  for (double& v : F.values) v = std::exp(0.5 * v);
  F.cap_bottom_value = std::exp(0.5 * G.cap_bottom_value);
  F.cap_top_value = std::exp(0.5 * G.cap_top_value);
  return F;
}

double area_at(const PatchField& F, double t) { return sublevel_area(F, std::exp(0.5 * t)); }

// nodes at grid distance exactly `ring` from the pole
template <class Fn>
void for_ring(const PatchField& G, int ring, Fn fn) {
  const auto& g = G.patch.grid();
  if (G.patch.kind() == PatchKind::Cylinder) {
    for (int j = 0; j < g.ny; ++j) fn(g.index(ring, j));
    return;
  }
  for (int dj = -ring; dj <= ring; ++dj)
    for (int di = -ring; di <= ring; ++di)
      if (std::max(std::abs(di), std::abs(dj)) == ring) fn(g.index(g.wrap_x(di), g.wrap_y(dj)));
}

}  // namespace

std::vector<double> default_t_grid(const PatchField& G, int levels) {
  if (levels < kFitLevels) throw Error(ErrorKind::Usage, "t-grid needs at least 10 levels");
  const auto& g = G.patch.grid();
  if (G.patch.kind() == PatchKind::ChartSquare) {
    throw Error(ErrorKind::Usage, "sublevel profiles need a cylinder or torus-cell field");
  }
  double cell = G.patch.node_density()[g.index(0, 0)] * g.hx * g.hy;
  double floor = std::log(16.0 * cell);
  for_ring(G, 8, [&](std::size_t k) { floor = std::max(floor, G.values[k]); });
  const double top = -0.05;
  if (floor >= top) throw Error(ErrorKind::Usage, "grid too coarse for a sublevel profile");
  std::vector<double> t(levels);
  double a = std::log(-floor), b = std::log(-top);
  for (int i = 0; i < levels; ++i) t[i] = -std::exp(a + (b - a) * i / (levels - 1));
  return t;
}

SublevelProfile sublevel_profile(const PatchField& G, std::vector<double> t_grid) {
  if (t_grid.size() < 3) throw Error(ErrorKind::Usage, "t-grid needs at least 3 levels");
  std::sort(t_grid.begin(), t_grid.end());
  SublevelProfile p;
  p.t = std::move(t_grid);
  const std::size_t n = p.t.size();
  PatchField F = exp_half(G);
  p.A.resize(n);
  p.sigma.resize(n);
  p.dAdt.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    p.A[i] = area_at(F, p.t[i]);
    ContourStats c = level_contour(F, std::exp(0.5 * p.t[i]));
    p.sigma[i] = c.length;
    p.touches_open_edge = p.touches_open_edge || c.touches_open_edge;
    double left = i > 0 ? p.t[i] - p.t[i - 1] : p.t[1] - p.t[0];
    double right = i + 1 < n ? p.t[i + 1] - p.t[i] : left;
    double d = 0.5 * std::min(left, right);
    // log A is nearly linear where the level sets are small; nothing below the floor
    double hi = p.t[i] + d, lo = std::max(p.t[i] - d, p.t.front());
    double up = area_at(F, hi), down = i == 0 ? p.A[0] : area_at(F, lo);
    p.dAdt[i] = up > 0.0 && down > 0.0 ? p.A[i] * (std::log(up) - std::log(down)) / (hi - lo)
                                       : (up - down) / (hi - lo);
  }
  if (p.touches_open_edge) p.warnings.push_back("level set reaches the patch edge");

  const int m = int(std::min<std::size_t>(kFitLevels, n));
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < m; ++i) {
    double x = std::exp(p.t[i]), y = std::exp(-p.t[i]) * p.A[i];
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  double det = m * sxx - sx * sx;
  double slope = (m * sxy - sx * sy) / det;
  p.ell_hat = (sy - slope * sx) / m;
  double ssr = 0;
  for (int i = 0; i < m; ++i) {
    double x = std::exp(p.t[i]), y = std::exp(-p.t[i]) * p.A[i];
    double r = y - p.ell_hat - slope * x;
    ssr += r * r;
  }
  p.ell_fit_residual = std::sqrt(ssr / m);
  p.ell_stderr = m > 2 ? std::sqrt(ssr / (m - 2) * sxx / det) : 0.0;
  return p;
}

BzReport bz_check(const SublevelProfile& p, double lambda, double slack) {
  BzReport rep;
  rep.slack = slack;
  rep.worst_relative_margin = std::numeric_limits<double>::infinity();
  rep.pass = true;
  for (std::size_t i = 0; i < p.t.size(); ++i) {
    double den = 4.0 * kPi - (2.0 / lambda) * p.A[i];
    if (den <= 0.0) {
      throw Error(ErrorKind::HypothesisViolation,
                  "4 pi - (2/lambda) A(t) <= 0 at t = " + std::to_string(p.t[i]));
    }
    BzRow r{p.t[i], p.A[i], p.sigma[i], p.dAdt[i], p.sigma[i] * p.sigma[i] / den, 0, 0, true};
    r.margin = r.dAdt - r.rhs;
    r.scale = std::max({std::abs(r.dAdt), r.rhs, 1e-300});
    r.pass = r.margin >= -slack * r.scale;
    rep.worst_relative_margin = std::min(rep.worst_relative_margin, r.margin / r.scale);
    rep.pass = rep.pass && r.pass;
    rep.rows.push_back(r);
  }
  return rep;
}

std::vector<ChainRow> chain_audit(const EnvelopeSolution& sol, const SublevelProfile& p,
                                  double slack) {
  const auto& patch = sol.G.patch;
  const auto& g = patch.grid();
  const auto& G = sol.G.values;
  const bool cyl = patch.kind() == PatchKind::Cylinder;
  std::vector<ChainRow> rows;
  for (std::size_t l = 0; l < p.t.size(); ++l) {
    const double t = p.t[l];
    // outward flux of G through the control volumes of {G_k < t}
    double flux = 0.0;
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        std::size_t k = g.index(i, j);
        if (!(G[k] < t)) continue;
        auto face = [&](int ii, int jj, double coef) {
          std::size_t q = g.index(g.wrap_x(ii), g.wrap_y(jj));
          if (G[q] < t) return;
          flux += coef * (G[q] - G[k]);
        };
        double as = cyl && (i == 0 || i == g.nx - 1) ? 0.5 * g.hx : g.hx;
        if (g.periodic_x || i + 1 < g.nx) face(i + 1, j, g.hy / g.hx);
        if (g.periodic_x || i > 0) face(i - 1, j, g.hy / g.hx);
        face(i, j + 1, as / g.hy);
        face(i, j - 1, as / g.hy);
      }
    }
    ChainRow r{t, 0.5 * flux, 0.5 * (4.0 * kPi - (2.0 / sol.lambda) * p.A[l]), true};
    r.pass = r.lhs <= r.rhs + slack * 2.0 * kPi;
    rows.push_back(r);
  }
  return rows;
}

IsoResult iso_check(const SurfaceModel& surface, const PatchField& F, double level, double k,
                    double slack) {
  if (sectional_upper_bound(surface) > k * (1.0 + 1e-9)) {
    throw Error(ErrorKind::HypothesisViolation, "curvature exceeds the comparison constant");
  }
  IsoResult r;
  r.area = sublevel_area(F, level);
  if (r.area > 0.5 * surface.total_area() * (1.0 + 1e-9)) {
    throw Error(ErrorKind::HypothesisViolation, "sublevel set exceeds half the total area");
  }
  r.sigma = level_contour(F, level).length;
  double L0 = model_L0(surface);
  r.lhs = r.sigma * r.sigma;
  r.rhs = std::min(L0 * L0, r.area * (4.0 * kPi - k * r.area));
  r.ratio = r.rhs > 0 ? r.lhs / r.rhs : std::numeric_limits<double>::infinity();
  r.pass = r.lhs >= (1.0 - slack) * r.rhs;
  return r;
}

OtBound ot_bound(const SublevelProfile& p, double lambda, double max_rel_stderr) {
  if (!(lambda > 1.0)) throw Error(ErrorKind::HypothesisViolation, "transport bound needs lambda > 1");
  if (!(p.ell_hat > 0.0) || p.ell_stderr > max_rel_stderr * p.ell_hat) {
    throw Error(ErrorKind::UnreliableLimit,
                "limit of e^{-t} A(t) is not resolved (stderr " + std::to_string(p.ell_stderr) + ")");
  }
  OtBound b;
  b.ell_hat = p.ell_hat;
  b.bound = ((lambda - 1.0) / lambda) / p.ell_hat;
  return b;
}

MonotonicityResult monotonicity_check(const SublevelProfile& p, double lambda, double slack) {
  MonotonicityResult r;
  r.ell_hat = p.ell_hat;
  r.limit_bound = 2.0 * kPi * lambda;
  if (p.t.size() < 2) {
    r.warning = "single level: monotonicity not tested";
    return r;
  }
  for (std::size_t i = 0; i + 1 < p.t.size(); ++i) {
    double a = std::exp(-p.t[i]) * p.A[i], b = std::exp(-p.t[i + 1]) * p.A[i + 1];
    r.worst_ratio = std::min(r.worst_ratio, b / a);
  }
  r.nondecreasing = r.worst_ratio >= 1.0 - slack;
  r.limit_ok = p.ell_hat <= r.limit_bound * (1.0 + slack);
  r.pass = r.nondecreasing && r.limit_ok;
  return r;
}

void write_profile_csv(std::ostream& os, const SublevelProfile& p, const BzReport* bz) {
  os << "t,A,sigma,dAdt,margin\n";
  os.precision(12);
  for (std::size_t i = 0; i < p.t.size(); ++i) {
    os << p.t[i] << ',' << p.A[i] << ',' << p.sigma[i] << ',' << p.dAdt[i] << ',';
    if (bz) os << bz->rows[i].margin;
    os << '\n';
  }
}

void write_plot_file(std::ostream& os, const std::vector<double>& x, const std::vector<double>& y) {
  os.precision(12);
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) os << x[i] << ' ' << y[i] << '\n';
}

}  // namespace bkern
