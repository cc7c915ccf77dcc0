#pragma once

#include <cstdint>
#include <vector>

#include "bkern/grid.hpp"
#include "bkern/surface.hpp"

namespace bkern {

// Geodesic distance from a base point, sampled on every chart grid.
struct DistanceField {
  ChartPoint base;
  std::vector<PatchField> charts;           // one per chart (P^1: two squares; torus: one cell)
  std::vector<std::vector<std::uint8_t>> valid;  // node within the certified injectivity radius
  double validity_radius = 0.0;

  // Bilinear interpolation in the owning chart.
  double at(const ChartPoint& p) const;
};

// Front propagation (second-order fast marching with first-order fallback) on
// each chart grid; P^1 charts exchange data on their overlap until stable.
DistanceField distance_field(const SurfaceModel& surface, const ChartPoint& x, int resolution);

enum class DistanceMode {
  Front,    // fast-marching values
  Refined,  // closed form on models, geodesic shooting otherwise
};

// Geodesic distance used where second derivatives are taken.
double refined_distance(const SurfaceModel& surface, const ChartPoint& x, const ChartPoint& y,
                        double guess);

// log sin^2(d/2) for d <= pi, 0 beyond.
double psi_of_distance(double d);

// psi(z) = log sin^2(d(z,x)/2) (0 beyond pi) for the metric omega / scale, on the
// chart grids. Requires the injectivity radius of omega/scale at x to be >= pi.
std::vector<PatchField> psi_field(const SurfaceModel& surface, const ChartPoint& x, int resolution,
                                  DistanceMode mode = DistanceMode::Refined, double scale = 1.0);

// psi for omega/scale on the log-polar cylinder (P^1) or the torus cell
// centred at x; the pole carries -1e300. Same injectivity precondition.
PatchField psi_patch(const SurfaceModel& surface, const ChartPoint& x, int resolution,
                     double scale = 1.0, double half_length = 8.0);

struct HessianReport {
  double min_ratio = 0.0;   // min of (i ddbar psi + omega1/2) / omega1
  ChartPoint argmin;
  int nodes_checked = 0;
  int nodes_excluded_pole = 0;
  int nodes_excluded_band = 0;
  double pole_radius = 0.0;  // metric radius of the excluded pole neighbourhood
  double band_cells = 3.0;   // half-width of the excluded cut-locus band, in cells
  bool richardson = false;
  double tolerance = 1e-3;
  bool pass = false;
};

// Margin of i ddbar psi + omega1/2 on the owned nodes of the given grids, with
// pole and cut-locus exclusions computed from the supplied distance grids
// (distances measured in omega1). Richardson (h, 2h) is applied when the raw
// minimum lies within twice the tolerance.
HessianReport comparison_margin(const std::vector<PatchField>& psi,
                                const std::vector<PatchField>& dist1, double scale,
                                double tolerance = 1e-3);

// Full check: hypothesis precheck (curvature of omega/scale <= 1 and
// injectivity radius >= pi), psi on the chart grids, margin.
HessianReport hessian_comparison_check(const SurfaceModel& surface, const ChartPoint& x,
                                       double scale, int resolution, double tolerance = 1e-3);

}  // namespace bkern
