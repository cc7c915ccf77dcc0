#include "bkern/grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "bkern/error.hpp"
#include "bkern/parallel.hpp"

namespace bkern {

double ParamGrid::node_weight(int i, int j) const {
  double wx = hx, wy = hy;
  if (!periodic_x && (i == 0 || i == nx - 1)) wx *= 0.5;
  if (!periodic_y && (j == 0 || j == ny - 1)) wy *= 0.5;
  return wx * wy;
}

double interpolate(const ParamGrid& g, const std::vector<double>& v, double u, double w) {
  double fx = (u - g.x0) / g.hx, fy = (w - g.y0) / g.hy;
  int i = int(std::floor(fx)), j = int(std::floor(fy));
  double ax = fx - i, ay = fy - j;
  if (!g.periodic_x) {
    i = std::clamp(i, 0, g.nx - 2);
    ax = std::clamp(fx - i, 0.0, 1.0);
  }
  if (!g.periodic_y) {
    j = std::clamp(j, 0, g.ny - 2);
    ay = std::clamp(fy - j, 0.0, 1.0);
  }
  int i1 = g.wrap_x(i + 1), j1 = g.wrap_y(j + 1);
  i = g.wrap_x(i);
  j = g.wrap_y(j);
  return (1 - ax) * (1 - ay) * v[g.index(i, j)] + ax * (1 - ay) * v[g.index(i1, j)] +
         ax * ay * v[g.index(i1, j1)] + (1 - ax) * ay * v[g.index(i, j1)];
}

ConformalPatch ConformalPatch::chart_square(const SurfaceModel& surface, int chart,
                                            int nodes_per_axis) {
  if (!surface.is_projective_line())
    throw Error(ErrorKind::Unsupported, "chart squares are P^1 charts");
  ConformalPatch p;
  p.kind_ = PatchKind::ChartSquare;
  p.surface_ = surface;
  p.chart_ = chart;
  double h = 2.0 * kChartRadius / (nodes_per_axis - 1);
  p.grid_ = ParamGrid{nodes_per_axis, nodes_per_axis, -kChartRadius, -kChartRadius, h, h, false, false};
  p.fill_density();
  return p;
}

ConformalPatch ConformalPatch::cylinder(const SurfaceModel& surface, const ChartPoint& centre,
                                        int n_theta, double half_length) {
  ConformalPatch p;
  p.kind_ = PatchKind::Cylinder;
  p.surface_ = surface;
  p.polar_.emplace(surface, centre);
  double ht = 2.0 * std::numbers::pi / n_theta;
  int ns = int(std::lround(2.0 * half_length / ht)) + 1;
  double hs = 2.0 * half_length / (ns - 1);
  p.grid_ = ParamGrid{ns, n_theta, -half_length, 0.0, hs, ht, false, true};
  p.fill_density();
  const auto& g = p.grid_;
  for (int j = 0; j < g.ny; ++j) {
    p.cap_bottom_ += 0.5 * p.density_[g.index(0, j)] * g.hy;
    p.cap_top_ += 0.5 * p.density_[g.index(g.nx - 1, j)] * g.hy;
  }
  return p;
}

ConformalPatch ConformalPatch::torus_cell(const SurfaceModel& surface, const ChartPoint& origin,
                                          int nodes_per_axis) {
  if (surface.is_projective_line() || !surface.rectangular_lattice() ||
      std::abs(surface.omega1().imag()) > 1e-12 * std::abs(surface.omega1())) {
    throw Error(ErrorKind::Unsupported, "torus grids need an axis-aligned rectangular lattice");
  }
  ConformalPatch p;
  p.kind_ = PatchKind::TorusCell;
  p.surface_ = surface;
  p.origin_ = origin.z;
  double a = std::abs(surface.omega1()), b = std::abs(surface.omega2());
  p.grid_ = ParamGrid{nodes_per_axis, nodes_per_axis, 0.0, 0.0, a / nodes_per_axis,
                      b / nodes_per_axis, true, true};
  p.fill_density();
  return p;
}

void ConformalPatch::fill_density() {
  density_.assign(grid_.size(), 0.0);
  parallel_for(grid_.ny, [&](std::ptrdiff_t j) {
    for (int i = 0; i < grid_.nx; ++i) {
      density_[grid_.index(i, int(j))] = area_density(grid_.x(i), grid_.y(int(j)));
    }
  });
}

ChartPoint ConformalPatch::point(double u, double v) const {
  switch (kind_) {
    case PatchKind::ChartSquare: return {chart_, {u, v}};
    case PatchKind::Cylinder: return polar_->point(u, v);
    case PatchKind::TorusCell: return surface_.normalize({0, origin_ + cplx(u, v)});
  }
  return {};
}

double ConformalPatch::area_density(double u, double v) const {
  if (kind_ == PatchKind::Cylinder) return polar_->area_density(u, v);
  return 2.0 * metric_density(surface_, point(u, v));
}

double ConformalPatch::cap_area(bool top) const { return top ? cap_top_ : cap_bottom_; }

double ConformalPatch::metric_cell(int i, int j) const {
  return std::sqrt(density_[grid_.index(i, j)]) * std::max(grid_.hx, grid_.hy);
}

namespace {

struct Vtx {
  double u, v, f, w;
};

Vtx lerp(const Vtx& a, const Vtx& b, double t) {
  double s = (t - a.f) / (b.f - a.f);
  return {a.u + s * (b.u - a.u), a.v + s * (b.v - a.v), t, a.w + s * (b.w - a.w)};
}

double tri_area(const Vtx& a, const Vtx& b, const Vtx& c) {
  return 0.5 * std::abs((b.u - a.u) * (c.v - a.v) - (c.u - a.u) * (b.v - a.v));
}

// int over {f < t} of the linear density on one triangle
double clipped_mass(const std::array<Vtx, 3>& tri, double t) {
  std::array<Vtx, 4> poly{};
  int n = 0;
  for (int k = 0; k < 3; ++k) {
    const Vtx& a = tri[k];
    const Vtx& b = tri[(k + 1) % 3];
    bool ain = a.f < t, bin = b.f < t;
    if (ain) poly[n++] = a;
    if (ain != bin) poly[n++] = lerp(a, b, t);
  }
  double m = 0.0;
  for (int k = 1; k + 1 < n; ++k) {
    m += tri_area(poly[0], poly[k], poly[k + 1]) * (poly[0].w + poly[k].w + poly[k + 1].w) / 3.0;
  }
  return m;
}

template <class Fn>
void for_each_triangle_row(const PatchField& f, int j, Fn&& fn) {
  const auto& g = f.patch.grid();
  const auto& w = f.patch.node_density();
  int j1 = g.wrap_y(j + 1);
  double v0 = g.y(j), v1 = v0 + g.hy;
  for (int i = 0; i < g.cells_x(); ++i) {
    int i1 = g.wrap_x(i + 1);
    double u0 = g.x(i), u1 = u0 + g.hx;
    Vtx a{u0, v0, f.values[g.index(i, j)], w[g.index(i, j)]};
    Vtx b{u1, v0, f.values[g.index(i1, j)], w[g.index(i1, j)]};
    Vtx c{u1, v1, f.values[g.index(i1, j1)], w[g.index(i1, j1)]};
    Vtx d{u0, v1, f.values[g.index(i, j1)], w[g.index(i, j1)]};
    fn(i, std::array<Vtx, 3>{a, b, c});
    fn(i, std::array<Vtx, 3>{a, c, d});
  }
}

}  // namespace

double sublevel_area(const PatchField& f, double t) {
  const auto& g = f.patch.grid();
  std::vector<double> rows(g.cells_y(), 0.0);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < g.cells_y(); ++j) {
    double acc = 0.0;
    for_each_triangle_row(f, j, [&](int, const std::array<Vtx, 3>& tri) { acc += clipped_mass(tri, t); });
    rows[j] = acc;
  }
  double area = 0.0;
  for (double r : rows) area += r;
  if (f.patch.kind() == PatchKind::Cylinder) {
    if (f.cap_bottom_value < t) area += f.patch.cap_area(false);
    if (f.cap_top_value < t) area += f.patch.cap_area(true);
  }
  return area;
}

ContourStats level_contour(const PatchField& f, double t) {
  const auto& g = f.patch.grid();
  std::vector<double> len(g.cells_y(), 0.0);
  std::vector<int> segs(g.cells_y(), 0), edge(g.cells_y(), 0);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < g.cells_y(); ++j) {
    for_each_triangle_row(f, j, [&](int i, const std::array<Vtx, 3>& tri) {
      std::array<Vtx, 2> pts{};
      int n = 0;
      for (int k = 0; k < 3 && n < 2; ++k) {
        const Vtx& a = tri[k];
        const Vtx& b = tri[(k + 1) % 3];
        if ((a.f < t) != (b.f < t)) pts[n++] = lerp(a, b, t);
      }
      if (n < 2) return;
      double du = pts[1].u - pts[0].u, dv = pts[1].v - pts[0].v;
      double wm = 0.5 * (std::sqrt(std::max(pts[0].w, 0.0)) + std::sqrt(std::max(pts[1].w, 0.0)));
      len[j] += std::sqrt(du * du + dv * dv) * wm;
      ++segs[j];
      bool open_edge = (!g.periodic_x && (i == 0 || i == g.cells_x() - 1)) ||
                       (!g.periodic_y && (j == 0 || j == g.cells_y() - 1));
      if (open_edge) edge[j] = 1;
    });
  }
  ContourStats s;
  for (int j = 0; j < g.cells_y(); ++j) {
    s.length += len[j];
    s.segments += segs[j];
    s.touches_open_edge = s.touches_open_edge || edge[j];
  }
  return s;
}

}  // namespace bkern
