#pragma once

#include <vector>

#include "bkern/surface.hpp"

namespace bkern {

struct PathPoint {
  ChartPoint p;
  cplx velocity;  // chart-coordinate velocity
  double s = 0.0; // arc-length parameter
};

struct GeodesicPath {
  std::vector<PathPoint> points;
  double arc_length = 0.0;  // trapezoid integral of |gamma'|_omega over the samples
  double max_speed_error = 0.0;
};

// |v|_omega at p: sqrt(2 g) |v|.
double tangent_norm(const SurfaceModel& surface, const ChartPoint& p, cplx v);

// Unit-speed geodesic from x with initial chart velocity v (|v|_omega = 1),
// adaptive Dormand-Prince with chart hand-off on P^1 and lattice wrapping on tori.
GeodesicPath geodesic_trace(const SurfaceModel& surface, const ChartPoint& x, cplx v,
                            double length, double tolerance = 1e-12);

// Geodesic distance by shooting: Newton on (initial angle, length) so that the
// geodesic from x ends at y, started from a distance estimate. Only meaningful
// inside the injectivity radius.
double shoot_distance(const SurfaceModel& surface, const ChartPoint& x, const ChartPoint& y,
                      double distance_guess);

}  // namespace bkern
