#pragma once

#include <optional>
#include <vector>

#include "bkern/surface.hpp"

namespace bkern {

// Uniform tensor grid over a parameter rectangle; node (i, j) sits at
// (x0 + i hx, y0 + j hy). Periodic directions wrap, others end at the last node.
struct ParamGrid {
  int nx = 0, ny = 0;
  double x0 = 0.0, y0 = 0.0, hx = 1.0, hy = 1.0;
  bool periodic_x = false, periodic_y = false;

  std::size_t size() const { return std::size_t(nx) * std::size_t(ny); }
  std::size_t index(int i, int j) const { return std::size_t(j) * nx + i; }
  double x(int i) const { return x0 + i * hx; }
  double y(int j) const { return y0 + j * hy; }
  int wrap_x(int i) const { return periodic_x ? (i % nx + nx) % nx : i; }
  int wrap_y(int j) const { return periodic_y ? (j % ny + ny) % ny : j; }
  int cells_x() const { return periodic_x ? nx : nx - 1; }
  int cells_y() const { return periodic_y ? ny : ny - 1; }
  // trapezoid weight of node (i, j) in du dv
  double node_weight(int i, int j) const;
};

// Bilinear interpolation of node values; periodic axes wrap, others clamp.
double interpolate(const ParamGrid& g, const std::vector<double>& v, double u, double w);

enum class PatchKind { ChartSquare, Cylinder, TorusCell };

// A rectangle of parameters mapped conformally onto (part of) the surface.
//   ChartSquare: [-R, R]^2 in chart coordinates (P^1).
//   Cylinder:    (s, theta) in [-S, S] x [0, 2pi), z = R_x(e^{s + i theta}) (P^1);
//                the caps beyond s = +-S are carried as lumped masses.
//   TorusCell:   the fundamental rectangle of an axis-aligned lattice, origin at a
//                chosen node, periodic both ways.
class ConformalPatch {
 public:
  static ConformalPatch chart_square(const SurfaceModel& surface, int chart, int nodes_per_axis);
  static ConformalPatch cylinder(const SurfaceModel& surface, const ChartPoint& centre,
                                 int n_theta, double half_length);
  static ConformalPatch torus_cell(const SurfaceModel& surface, const ChartPoint& origin,
                                   int nodes_per_axis);

  PatchKind kind() const { return kind_; }
  const ParamGrid& grid() const { return grid_; }
  const SurfaceModel& surface() const { return surface_; }
  int chart() const { return chart_; }

  ChartPoint point(double u, double v) const;
  ChartPoint node_point(int i, int j) const { return point(grid_.x(i), grid_.y(j)); }
  // omega density with respect to du dv
  double area_density(double u, double v) const;
  const std::vector<double>& node_density() const { return density_; }
  // Cylinder only: omega mass of the cap below s = -S (bottom) or above s = S (top).
  double cap_area(bool top) const;
  // Grid length scale converted to metric length at a node.
  double metric_cell(int i, int j) const;

 private:
  PatchKind kind_ = PatchKind::ChartSquare;
  SurfaceModel surface_;
  ParamGrid grid_;
  int chart_ = 0;
  cplx origin_{};
  std::optional<PolarChart> polar_;
  std::vector<double> density_;
  double cap_bottom_ = 0.0, cap_top_ = 0.0;

  void fill_density();
};

// A scalar field sampled on a patch's nodes.
struct PatchField {
  ConformalPatch patch;
  std::vector<double> values;
  // value carried by the cylinder caps (bottom: pole side, top: far side)
  double cap_bottom_value = -1e300;
  double cap_top_value = 0.0;

  double at_node(int i, int j) const { return values[patch.grid().index(i, j)]; }
};

// int_{f < t} omega with piecewise-linear f on the two triangles of each cell,
// exact sub-triangle clipping, density interpolated linearly. Includes caps.
double sublevel_area(const PatchField& f, double t);

struct ContourStats {
  double length = 0.0;        // metric length of {f = t}
  int segments = 0;
  bool touches_open_edge = false;  // crossed a cell on a non-periodic boundary row
};
// Marching triangles (same triangulation as sublevel_area).
ContourStats level_contour(const PatchField& f, double t);

}  // namespace bkern
