#include "bkern/geodesic.hpp"
#include <cstdio>

#include <array>
#include <cmath>
#include <numbers>

#include <boost/numeric/odeint.hpp>

#include "bkern/error.hpp"

namespace bkern {

namespace {

using State = std::array<double, 4>;
namespace odeint = boost::numeric::odeint;

struct GeodesicRhs {
  const SurfaceModel* surface;
  int chart;

  void operator()(const State& q, State& dq, double) const {
    cplx grad = 0.5 * log_density_gradient(*surface, {chart, {q[0], q[1]}});
    double ux = grad.real(), uy = grad.imag();
    double vx = q[2], vy = q[3];
    dq[0] = vx;
    dq[1] = vy;
    dq[2] = -ux * (vx * vx - vy * vy) - 2.0 * uy * vx * vy;
    dq[3] = -uy * (vy * vy - vx * vx) - 2.0 * ux * vx * vy;
  }
};

// Re-express the state in the preferred chart; returns the new chart id.
int hand_off(const SurfaceModel& surface, int chart, State& q) {
  cplx z(q[0], q[1]), v(q[2], q[3]);
  if (surface.is_projective_line()) {
    if (std::abs(z) <= 1.1) return chart;
    cplx w = 1.0 / z;
    cplx vw = -v * w * w;
    q = {w.real(), w.imag(), vw.real(), vw.imag()};
    return 1 - chart;
  }
  cplx zn = surface.normalize({0, z}).z;
  q[0] = zn.real();
  q[1] = zn.imag();
  return chart;
}

}  // namespace

double tangent_norm(const SurfaceModel& surface, const ChartPoint& p, cplx v) {
  return std::sqrt(2.0 * metric_density(surface, p)) * std::abs(v);
}

GeodesicPath geodesic_trace(const SurfaceModel& surface, const ChartPoint& x, cplx v,
                            double length, double tolerance) {
  if (length < 0.0) throw Error(ErrorKind::Usage, "geodesic length must be nonnegative");
  double speed = tangent_norm(surface, x, v);
  if (std::abs(speed - 1.0) > 1e-9)
    throw Error(ErrorKind::Usage, "initial velocity must have unit omega-length, got " +
                                      std::to_string(speed));
  GeodesicPath path;
  path.points.push_back({x, v, 0.0});
  if (length == 0.0) return path;

  int chart = x.chart;
  State q{x.z.real(), x.z.imag(), v.real(), v.imag()};
  chart = hand_off(surface, chart, q);
  auto stepper = odeint::make_controlled(tolerance, tolerance, odeint::runge_kutta_dopri5<State>());
  double t = 0.0;
  double dt = std::min(0.01, length);
  double prev_speed = 1.0;
  while (t < length) {
    dt = std::min(dt, length - t);
    GeodesicRhs rhs{&surface, chart};
    if (stepper.try_step(rhs, q, t, dt) == odeint::fail) {
      if (dt < 1e-14) {
        throw Error(ErrorKind::IntegrationFailure,
                    "geodesic step size underflow at s=" + std::to_string(t));
      }
      continue;
    }
    chart = hand_off(surface, chart, q);
    ChartPoint p{chart, {q[0], q[1]}};
    cplx vel(q[2], q[3]);
    double sp = tangent_norm(surface, p, vel);
    path.arc_length += 0.5 * (prev_speed + sp) * (t - path.points.back().s);
    path.max_speed_error = std::max(path.max_speed_error, std::abs(sp - 1.0));
    prev_speed = sp;
    path.points.push_back({p, vel, t});
  }
  return path;
}

double shoot_distance(const SurfaceModel& surface, const ChartPoint& x, const ChartPoint& y,
                      double distance_guess) {
  if (distance_guess <= 0.0) return 0.0;
  ChartPoint yx = y;
  if (surface.is_projective_line() && y.chart != x.chart) {
    if (std::abs(y.z) > 1e-12) yx = {x.chart, 1.0 / y.z};
  }
  auto residual = [&](double angle, double len) -> cplx {
    cplx dir = std::polar(1.0, angle);
    dir /= tangent_norm(surface, x, dir);
    auto path = geodesic_trace(surface, x, dir, len, 1e-11);
    ChartPoint end = path.points.back().p;
    if (surface.is_projective_line()) {
      ChartPoint e = end.chart == y.chart ? end : surface.to_chart(end, y.chart);
      return e.z - y.z;
    }
    cplx d = surface.normalize({0, end.z - y.z + surface.omega1() * 0.5 + surface.omega2() * 0.5}).z;
    return d - surface.omega1() * 0.5 - surface.omega2() * 0.5;
  };
  cplx dz = yx.z - x.z;
  if (!surface.is_projective_line()) {
    dz = surface.normalize({0, dz + surface.omega1() * 0.5 + surface.omega2() * 0.5}).z -
         surface.omega1() * 0.5 - surface.omega2() * 0.5;
  }
  double angle = std::arg(dz);
  double len = distance_guess;
  for (int it = 0; it < 30; ++it) {
    cplx r = residual(angle, len);
    if (std::abs(r) < 1e-10) return len;
    const double e = 1e-6;
    cplx ra = (residual(angle + e, len) - r) / e;
    cplx rl = (residual(angle, len + e) - r) / e;
    double det = ra.real() * rl.imag() - ra.imag() * rl.real();
    if (std::abs(det) < 1e-300) break;
    double da = (r.real() * rl.imag() - r.imag() * rl.real()) / det;
    double dl = (ra.real() * r.imag() - ra.imag() * r.real()) / det;
    angle -= da;
    len = std::max(1e-12, len - dl);
    // integrator noise floor: accept once the Newton step has stalled
    if (std::abs(da) < 1e-9 && std::abs(dl) < 1e-9 * std::max(1.0, len) && std::abs(r) < 1e-7)
      return len;
  }
  throw Error(ErrorKind::IntegrationFailure, "geodesic shooting did not converge");
}

}  // namespace bkern
