#include "bkern/distance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <queue>

#include "bkern/error.hpp"
#include "bkern/geodesic.hpp"
#include "bkern/parallel.hpp"

namespace bkern {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

using Seeds = std::vector<std::pair<std::size_t, double>>;

// Solve sum_k alpha_k (T - beta_k)^2 = F^2 for the upwind root, dropping the
// larger-beta term when the two-term root is not causal.
double upwind_solve(double F, std::array<std::pair<double, double>, 2> terms, int n) {
  if (n == 0) return kInf;
  if (n == 2 && terms[1].second < terms[0].second) std::swap(terms[0], terms[1]);
  double best = terms[0].second + F / std::sqrt(terms[0].first);
  if (n == 2 && best > terms[1].second) {
    double a = terms[0].first + terms[1].first;
    double b = -2.0 * (terms[0].first * terms[0].second + terms[1].first * terms[1].second);
    double c = terms[0].first * terms[0].second * terms[0].second +
               terms[1].first * terms[1].second * terms[1].second - F * F;
    double disc = b * b - 4 * a * c;
    if (disc >= 0.0) {
      double t = (-b + std::sqrt(disc)) / (2 * a);
      if (t >= terms[1].second) best = std::min(best, t);
    }
  }
  return best;
}

// Fast marching on one grid. F is the slowness (metric factor sqrt(2g) in
// parameter units); seeds enter as trial values and are never lowered.
void fast_march(const ParamGrid& g, const std::vector<double>& F, std::vector<double>& T,
                const Seeds& seeds) {
  enum : std::uint8_t { Far, Trial, Known };
  std::vector<std::uint8_t> state(g.size(), Far), fixed(g.size(), 0);
  T.assign(g.size(), kInf);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  for (auto [k, v] : seeds) {
    if (v < T[k]) {
      T[k] = v;
      state[k] = Trial;
      fixed[k] = 1;
      heap.push({v, k});
    }
  }
  auto known = [&](int i, int j, double& out) {
    if (!g.periodic_x && (i < 0 || i >= g.nx)) return false;
    if (!g.periodic_y && (j < 0 || j >= g.ny)) return false;
    std::size_t k = g.index(g.wrap_x(i), g.wrap_y(j));
    if (state[k] != Known) return false;
    out = T[k];
    return true;
  };
  auto axis_term = [&](int i, int j, int di, int dj, double h, std::pair<double, double>& term) {
    double best = kInf, second = kInf;
    bool have = false, have2 = false;
    for (int s : {-1, 1}) {
      double u1, u2;
      if (!known(i + s * di, j + s * dj, u1)) continue;
      if (u1 < best) {
        best = u1;
        have = true;
        have2 = known(i + 2 * s * di, j + 2 * s * dj, u2) && u2 <= u1;
        second = have2 ? u2 : kInf;
      }
    }
    if (!have) return false;
    if (have2) {
      term = {9.0 / (4.0 * h * h), (4.0 * best - second) / 3.0};
    } else {
      term = {1.0 / (h * h), best};
    }
    return true;
  };
  while (!heap.empty()) {
    auto [v, k] = heap.top();
    heap.pop();
    if (state[k] == Known || v > T[k]) continue;
    state[k] = Known;
    int i = int(k % g.nx), j = int(k / g.nx);
    const int nb[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    for (auto& d : nb) {
      int ni = i + d[0], nj = j + d[1];
      if (!g.periodic_x && (ni < 0 || ni >= g.nx)) continue;
      if (!g.periodic_y && (nj < 0 || nj >= g.ny)) continue;
      ni = g.wrap_x(ni);
      nj = g.wrap_y(nj);
      std::size_t nk = g.index(ni, nj);
      if (state[nk] == Known || fixed[nk]) continue;
      std::array<std::pair<double, double>, 2> terms{};
      int n = 0;
      if (axis_term(ni, nj, 1, 0, g.hx, terms[n])) ++n;
      if (axis_term(ni, nj, 0, 1, g.hy, terms[n])) ++n;
      double t = upwind_solve(F[nk], terms, n);
      if (t < T[nk]) {
        T[nk] = t;
        state[nk] = Trial;
        heap.push({t, nk});
      }
    }
  }
}

// Parameter coordinates of a surface point in a patch (chart square or torus cell).
cplx patch_coords(const ConformalPatch& patch, const ChartPoint& p) {
  if (patch.kind() == PatchKind::TorusCell) return patch.surface().normalize(p).z;
  return patch.surface().to_chart(p, patch.chart()).z;
}

bool owned(const ConformalPatch& patch, int i, int j) {
  if (patch.kind() != PatchKind::ChartSquare) return true;
  double r = std::abs(cplx(patch.grid().x(i), patch.grid().y(j)));
  return patch.chart() == 0 ? r <= kOwnRadius : r < kOwnRadius;
}

// Metric length of the straight chart segment a -> b (Gauss-Legendre, 6 points).
double segment_length(const SurfaceModel& surface, int chart, cplx a, cplx b) {
  static const double xs[6] = {-0.9324695142031521, -0.6612093864662645, -0.2386191860831969,
                               0.2386191860831969,  0.6612093864662645,  0.9324695142031521};
  static const double ws[6] = {0.1713244923791704, 0.3607615730481386, 0.4679139345726910,
                               0.4679139345726910, 0.3607615730481386, 0.1713244923791704};
  double acc = 0.0;
  for (int k = 0; k < 6; ++k) {
    cplx z = a + 0.5 * (xs[k] + 1.0) * (b - a);
    acc += ws[k] * std::sqrt(2.0 * metric_density(surface, {chart, z}));
  }
  return 0.5 * acc * std::abs(b - a);
}

std::vector<ConformalPatch> chart_grids(const SurfaceModel& surface, int resolution) {
  if (resolution < 16) throw Error(ErrorKind::Usage, "grid resolution must be at least 16");
  if (surface.is_projective_line()) {
    return {ConformalPatch::chart_square(surface, 0, resolution),
            ConformalPatch::chart_square(surface, 1, resolution)};
  }
  return {ConformalPatch::torus_cell(surface, {0, {0.0, 0.0}}, resolution)};
}

Seeds source_seeds(const ConformalPatch& patch, const ChartPoint& x) {
  const auto& g = patch.grid();
  const auto& surface = patch.surface();
  cplx c = patch_coords(patch, x);
  double h = std::max(g.hx, g.hy);
  Seeds seeds;
  int ci = int(std::lround((c.real() - g.x0) / g.hx));
  int cj = int(std::lround((c.imag() - g.y0) / g.hy));
  const int r = 8;
  for (int dj = -r; dj <= r; ++dj) {
    for (int di = -r; di <= r; ++di) {
      int i = ci + di, j = cj + dj;
      if (!g.periodic_x && (i < 0 || i >= g.nx)) continue;
      if (!g.periodic_y && (j < 0 || j >= g.ny)) continue;
      cplx node(g.x0 + i * g.hx, g.y0 + j * g.hy);  // unwrapped: straight segment from c
      if (std::abs(node - c) > r * h) continue;
      double d;
      if (patch.kind() == PatchKind::TorusCell) {
        double f = std::sqrt(2.0 * metric_density(surface, {0, c}));
        d = f * std::abs(node - c);
        if (surface.perturbed()) d = segment_length(surface, 0, c, node);
      } else {
        d = segment_length(surface, patch.chart(), c, node);
      }
      seeds.push_back({g.index(g.wrap_x(i), g.wrap_y(j)), d});
    }
  }
  return seeds;
}

std::vector<double> slowness(const ConformalPatch& patch) {
  std::vector<double> F(patch.grid().size());
  const auto& w = patch.node_density();
  for (std::size_t k = 0; k < F.size(); ++k) F[k] = std::sqrt(w[k]);
  return F;
}

}  // namespace

double DistanceField::at(const ChartPoint& p) const {
  const auto& surface = charts.front().patch.surface();
  ChartPoint q = surface.normalize(p);
  const PatchField& f = surface.is_projective_line() ? charts[q.chart] : charts.front();
  cplx c = patch_coords(f.patch, q);
  return interpolate(f.patch.grid(), f.values, c.real(), c.imag());
}

DistanceField distance_field(const SurfaceModel& surface, const ChartPoint& x0, int resolution) {
  auto patches = chart_grids(surface, resolution);
  ChartPoint x = surface.normalize(x0);
  DistanceField field;
  field.base = x;
  try {
    field.validity_radius = klingenberg_bounds(surface).lower;
  } catch (const Error&) {
    field.validity_radius = kInf;
  }

  std::vector<std::vector<double>> T(patches.size());
  if (!surface.is_projective_line()) {
    fast_march(patches[0].grid(), slowness(patches[0]), T[0], source_seeds(patches[0], x));
  } else {
    int cur = x.chart;
    fast_march(patches[cur].grid(), slowness(patches[cur]), T[cur], source_seeds(patches[cur], x));
    std::vector<double> previous;
    for (int round = 0; round < 8; ++round) {
      int other = 1 - cur;
      const auto& g = patches[other].grid();
      Seeds seeds = x.chart == other ? source_seeds(patches[other], x) : Seeds{};
      for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
          cplx w(g.x(i), g.y(j));
          if (std::abs(w) <= kOwnRadius) continue;
          cplx z = 1.0 / w;
          double v = interpolate(patches[cur].grid(), T[cur], z.real(), z.imag());
          if (std::isfinite(v)) seeds.push_back({g.index(i, j), v});
        }
      }
      previous = T[other];
      fast_march(g, slowness(patches[other]), T[other], seeds);
      double change = 0.0;
      if (previous.size() == T[other].size()) {
        for (std::size_t k = 0; k < previous.size(); ++k) {
          if (std::isfinite(previous[k]) && std::isfinite(T[other][k]))
            change = std::max(change, std::abs(previous[k] - T[other][k]));
          else if (std::isfinite(previous[k]) != std::isfinite(T[other][k]))
            change = kInf;
        }
      } else {
        change = kInf;
      }
      cur = other;
      if (round >= 2 && change < 1e-12) break;
    }
  }

  for (std::size_t c = 0; c < patches.size(); ++c) {
    const auto& g = patches[c].grid();
    std::vector<std::uint8_t> valid(g.size(), 0);
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        std::size_t k = g.index(i, j);
        if (owned(patches[c], i, j) && !std::isfinite(T[c][k])) {
          throw Error(ErrorKind::Coverage, "front propagation did not reach every owned node");
        }
        valid[k] = T[c][k] <= field.validity_radius;
      }
    }
    field.charts.push_back(PatchField{patches[c], T[c]});
    field.valid.push_back(std::move(valid));
  }
  return field;
}

double refined_distance(const SurfaceModel& surface, const ChartPoint& x, const ChartPoint& y,
                        double guess) {
  if (!surface.perturbed()) return model_distance(surface, x, y);
  return shoot_distance(surface, x, y, guess);
}

double psi_of_distance(double d) {
  if (d > kPi) return 0.0;
  double s = std::sin(0.5 * d);
  return std::log(s * s);
}

namespace {

std::vector<PatchField> distance_grids(const SurfaceModel& surface, const ChartPoint& x,
                                       int resolution, DistanceMode mode) {
  if (mode == DistanceMode::Front || surface.perturbed()) {
    auto field = distance_field(surface, x, resolution);
    if (mode == DistanceMode::Front) return field.charts;
    for (auto& f : field.charts) {
      const auto& g = f.patch.grid();
      parallel_for(g.ny, [&](std::ptrdiff_t j) {
        for (int i = 0; i < g.nx; ++i) {
          std::size_t k = g.index(i, int(j));
          if (!owned(f.patch, i, int(j)) && f.patch.kind() == PatchKind::ChartSquare &&
              std::abs(cplx(g.x(i), g.y(int(j)))) > kOwnRadius + 4 * g.hx)
            continue;
          if (f.values[k] > 0.0 && f.values[k] < field.validity_radius)
            f.values[k] = shoot_distance(surface, x, f.patch.node_point(i, int(j)), f.values[k]);
        }
      });
    }
    return field.charts;
  }
  std::vector<PatchField> out;
  for (auto& patch : chart_grids(surface, resolution)) {
    PatchField f{patch, std::vector<double>(patch.grid().size())};
    const auto& g = patch.grid();
    parallel_for(g.ny, [&](std::ptrdiff_t j) {
      for (int i = 0; i < g.nx; ++i)
        f.values[g.index(i, int(j))] = model_distance(surface, x, patch.node_point(i, int(j)));
    });
    out.push_back(std::move(f));
  }
  return out;
}

void check_comparison_hypotheses(const SurfaceModel& surface, double scale) {
  double kmax = sectional_upper_bound(surface) * scale;
  if (kmax > 1.0 + 1e-9) {
    throw Error(ErrorKind::HypothesisViolation,
                "sectional curvature of omega/scale is " + std::to_string(kmax) + " > 1");
  }
  double inj = klingenberg_bounds(surface).lower / std::sqrt(scale);
  if (inj < kPi * (1.0 - 1e-9)) {
    throw Error(ErrorKind::HypothesisViolation,
                "injectivity radius certificate " + std::to_string(inj) + " < pi");
  }
}

}  // namespace

std::vector<PatchField> psi_field(const SurfaceModel& surface, const ChartPoint& x, int resolution,
                                  DistanceMode mode, double scale) {
  double inj = klingenberg_bounds(surface).lower / std::sqrt(scale);
  if (inj < kPi * (1.0 - 1e-9)) {
    throw Error(ErrorKind::HypothesisViolation,
                "injectivity radius certificate " + std::to_string(inj) + " < pi");
  }
  auto grids = distance_grids(surface, x, resolution, mode);
  for (auto& f : grids) {
    const auto& g = f.patch.grid();
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        std::size_t k = g.index(i, j);
        double d = f.values[k] / std::sqrt(scale);
        // pole node: a quarter cell in place of zero keeps the field finite
        if (d <= 0.0) d = 0.25 * f.patch.metric_cell(i, j) / std::sqrt(scale);
        f.values[k] = psi_of_distance(d);
      }
    }
  }
  return grids;
}

PatchField psi_patch(const SurfaceModel& surface, const ChartPoint& x, int resolution, double scale,
                     double half_length) {
  double inj = klingenberg_bounds(surface).lower / std::sqrt(scale);
  if (inj < kPi * (1.0 - 1e-9)) {
    throw Error(ErrorKind::HypothesisViolation,
                "injectivity radius certificate " + std::to_string(inj) + " < pi");
  }
  const bool cyl = surface.is_projective_line();
  ConformalPatch patch = cyl ? ConformalPatch::cylinder(surface, x, resolution, half_length)
                             : ConformalPatch::torus_cell(surface, x, resolution);
  std::optional<DistanceField> front;
  if (surface.perturbed()) front = distance_field(surface, x, resolution);
  const auto& g = patch.grid();
  std::vector<double> v(g.size());
  parallel_for(g.ny, [&](std::ptrdiff_t j) {
    for (int i = 0; i < g.nx; ++i) {
      std::size_t k = g.index(i, int(j));
      if (!cyl && k == 0) {
        v[k] = -1e300;
        continue;
      }
      ChartPoint p = patch.node_point(i, int(j));
      double d = refined_distance(surface, x, p, front ? front->at(p) : 0.0);
      v[k] = psi_of_distance(d / std::sqrt(scale));
    }
  });
  PatchField f{patch, v};
  if (cyl) {
    double top = 0.0;
    for (int j = 0; j < g.ny; ++j) top += v[g.index(g.nx - 1, j)];
    f.cap_top_value = top / g.ny;
  }
  return f;
}

HessianReport comparison_margin(const std::vector<PatchField>& psi,
                                const std::vector<PatchField>& dist1, double scale,
                                double tolerance) {
  HessianReport rep;
  rep.tolerance = tolerance;
  const double pole_cells = 12.0;

  struct NodeEval {
    double raw = kInf, rich = kInf;
    int checked = 0, pole = 0, band = 0;
    ChartPoint at_raw, at_rich;
  };

  auto evaluate = [&](const PatchField& pf, const PatchField& df, int j) {
    NodeEval e;
    const auto& g = pf.patch.grid();
    const auto& W = pf.patch.node_density();
    for (int i = 0; i < g.nx; ++i) {
      if (!owned(pf.patch, i, j)) continue;
      std::size_t k = g.index(i, j);
      double cell = std::sqrt(W[k] / scale) * g.hx;
      if (df.values[k] < pole_cells * cell) {
        ++e.pole;
        continue;
      }
      bool in_band = false;
      for (int s = -2; s <= 2 && !in_band; ++s) {
        for (int axis = 0; axis < 2 && !in_band; ++axis) {
          int ii = axis == 0 ? i + s : i, jj = axis == 0 ? j : j + s;
          double d = df.values[g.index(g.wrap_x(ii), g.wrap_y(jj))];
          if (std::abs(d - kPi) < 3.0 * cell) in_band = true;
        }
      }
      if (in_band) {
        ++e.band;
        continue;
      }
      auto lap = [&](int s) {
        auto at = [&](int di, int dj) { return pf.values[g.index(g.wrap_x(i + di), g.wrap_y(j + dj))]; };
        return (at(s, 0) + at(-s, 0) - 2 * at(0, 0)) / (s * s * g.hx * g.hx) +
               (at(0, s) + at(0, -s) - 2 * at(0, 0)) / (s * s * g.hy * g.hy);
      };
      double dens = W[k] / scale;
      double l1 = lap(1), l2 = lap(2);
      double raw = 0.5 * l1 / dens + 0.5;
      double rich = 0.5 * (4.0 * l1 - l2) / 3.0 / dens + 0.5;
      ++e.checked;
      if (raw < e.raw) {
        e.raw = raw;
        e.at_raw = pf.patch.node_point(i, j);
      }
      if (rich < e.rich) {
        e.rich = rich;
        e.at_rich = pf.patch.node_point(i, j);
      }
    }
    return e;
  };

  NodeEval total;
  for (std::size_t c = 0; c < psi.size(); ++c) {
    const auto& g = psi[c].patch.grid();
    std::vector<NodeEval> rows(g.ny);
    parallel_for(g.ny, [&](std::ptrdiff_t j) { rows[j] = evaluate(psi[c], dist1[c], int(j)); });
    for (const auto& r : rows) {
      total.checked += r.checked;
      total.pole += r.pole;
      total.band += r.band;
      if (r.raw < total.raw) {
        total.raw = r.raw;
        total.at_raw = r.at_raw;
      }
      if (r.rich < total.rich) {
        total.rich = r.rich;
        total.at_rich = r.at_rich;
      }
    }
  }
  rep.nodes_checked = total.checked;
  rep.nodes_excluded_pole = total.pole;
  rep.nodes_excluded_band = total.band;
  rep.pole_radius = pole_cells;
  rep.min_ratio = total.raw;
  rep.argmin = total.at_raw;
  if (total.raw <= 2.0 * tolerance) {
    rep.richardson = true;
    rep.min_ratio = total.rich;
    rep.argmin = total.at_rich;
  }
  rep.pass = rep.min_ratio >= -tolerance;
  return rep;
}

HessianReport hessian_comparison_check(const SurfaceModel& surface, const ChartPoint& x,
                                       double scale, int resolution, double tolerance) {
  if (!(scale > 0.0)) throw Error(ErrorKind::Usage, "scale must be positive");
  check_comparison_hypotheses(surface, scale);
  auto dist = distance_grids(surface, x, resolution, DistanceMode::Refined);
  for (auto& f : dist)
    for (auto& v : f.values) v /= std::sqrt(scale);
  auto psi = dist;
  for (auto& f : psi) {
    const auto& g = f.patch.grid();
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        std::size_t k = g.index(i, j);
        double d = f.values[k];
        if (d <= 0.0) d = 0.25 * f.patch.metric_cell(i, j) / std::sqrt(scale);
        f.values[k] = psi_of_distance(d);
      }
  }
  return comparison_margin(psi, dist, scale, tolerance);
}

}  // namespace bkern
