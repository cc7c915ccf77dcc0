#pragma once

// Model compact Riemann surfaces with a positive line bundle (L, e^{-phi}).
//
// Normalization, fixed once for the whole library. In a chart coordinate
// z = x + iy:
//   g      = d^2 phi / dz dzbar = (Laplacian phi) / 4     (metric density)
//   omega  = i ddbar phi = g * i dz^dzbar = 2 g dx dy      (area form)
//   ds^2   = 2 g |dz|^2                                    (Riemannian metric)
//   i ddbar f = (Laplacian f) / 2 dx dy,   i ddbar log|z|^2 = 2 pi delta_0
// With phi = 2 log(1+|z|^2) on P^1 this is the unit round sphere:
// int omega = 4 pi, Ric omega = omega, L0 = 2 pi.

#include <array>
#include <complex>
#include <optional>
#include <vector>

#include "bkern/expr.hpp"

namespace bkern {

using cplx = std::complex<double>;

enum class SurfaceKind { ProjectiveLine, Torus };

// A point in a chart. P^1: chart 0 is the z-plane, chart 1 the w = 1/z plane.
// The torus has the single chart 0 (the plane, read modulo the lattice).
struct ChartPoint {
  int chart = 0;
  cplx z{0.0, 0.0};
};

struct Chart {
  int id = 0;
  double radius = 0.0;      // P^1: grid square half-width; torus: unused
  double own_radius = 0.0;  // P^1: ownership disk |z| <= own_radius
  cplx period1{}, period2{};  // torus fundamental parallelogram
  int nodes_per_axis = 0;
};

inline constexpr double kChartRadius = 1.2;
inline constexpr double kOwnRadius = 1.0;

class SurfaceModel {
 public:
  // phi = c log(1 + |z|^2) + rho; deg L = c.
  static SurfaceModel projective_line(double c, Expr perturbation = {});
  // Lattice Z omega1 + Z omega2, deg L = degree, g = pi degree / cell area + ddbar rho.
  static SurfaceModel torus(cplx omega1, cplx omega2, double degree, Expr perturbation = {});
  // Square lattice with the flat potential |z|^2/2 (g = 1/2): side sqrt(2 pi degree).
  static SurfaceModel square_torus(double degree);

  SurfaceKind kind() const { return kind_; }
  bool is_projective_line() const { return kind_ == SurfaceKind::ProjectiveLine; }
  double scale() const { return c_; }
  double degree() const;  // (1/2pi) int omega
  double total_area() const { return 2.0 * 3.141592653589793238462643383279502884 * degree(); }
  cplx omega1() const { return omega1_; }
  cplx omega2() const { return omega2_; }
  cplx tau() const { return omega2_ / omega1_; }
  double cell_area() const;
  bool rectangular_lattice() const;

  const Expr& perturbation() const { return rho_; }
  bool perturbed() const { return !rho_.empty(); }
  std::optional<double> certified_L0() const { return certified_L0_; }
  void set_certified_L0(double L0) { certified_L0_ = L0; }

  // phi in the chart's frame.
  double potential(const ChartPoint& p) const;
  // rho evaluated at a chart point.
  double perturbation_at(const ChartPoint& p) const;

  ChartPoint normalize(const ChartPoint& p) const;
  ChartPoint to_chart(const ChartPoint& p, int chart) const;
  bool in_chart_domain(const ChartPoint& p) const;
  std::vector<Chart> charts(int resolution) const;

 private:
  SurfaceKind kind_ = SurfaceKind::ProjectiveLine;
  double c_ = 2.0;
  double torus_degree_ = 0.0;
  cplx omega1_{}, omega2_{};
  Expr rho_;
  std::optional<double> certified_L0_;
};

// Metric density g > 0 at p (analytic model term + finite-difference ddbar rho).
double metric_density(const SurfaceModel& surface, const ChartPoint& p);
// Gradient of log g in chart coordinates, returned as d/dx + i d/dy.
cplx log_density_gradient(const SurfaceModel& surface, const ChartPoint& p);

// r with Ric omega = r omega at p.
double ricci_ratio(const SurfaceModel& surface, const ChartPoint& p);
// Always the finite-difference route: r = -Lap(log g) / (4 g), Richardson on (h, 2h).
double ricci_ratio_fd(const SurfaceModel& surface, const ChartPoint& p, double h = 2e-3);

// Points covering every chart's owned region; per_axis controls density.
std::vector<ChartPoint> sample_nodes(const SurfaceModel& surface, int per_axis);

// Max Gaussian curvature over sample nodes (equals ricci_ratio on surfaces).
double sectional_upper_bound(const SurfaceModel& surface, int per_axis = 48);

double model_L0(const SurfaceModel& surface);

struct InjectivityBracket {
  double lower = 0.0;
  double upper = 0.0;
};
InjectivityBracket klingenberg_bounds(const SurfaceModel& surface);

// Closed-form geodesic distance on unperturbed models.
double model_distance(const SurfaceModel& surface, const ChartPoint& a, const ChartPoint& b);

// Shortest nonzero lattice vector (Euclidean in z).
double shortest_lattice_vector(cplx omega1, cplx omega2);

// P^1 only: unit sphere embedding and its inverse (chart chosen by hemisphere).
std::array<double, 3> to_unit_sphere(const ChartPoint& p);
ChartPoint from_unit_sphere(const std::array<double, 3>& v);

// Conformal log-polar chart centred at x (P^1 only): zeta = s + i theta,
// w = e^zeta, point = R_x(w) with R_x a round-sphere rotation taking 0 to x.
class PolarChart {
 public:
  PolarChart(const SurfaceModel& surface, const ChartPoint& centre);

  ChartPoint point(double s, double theta) const;
  // omega density with respect to ds dtheta.
  double area_density(double s, double theta) const;
  const ChartPoint& centre() const { return centre_; }

 private:
  SurfaceModel surface_;
  ChartPoint centre_;
  std::array<std::array<double, 3>, 3> rot_{};
};

}  // namespace bkern
