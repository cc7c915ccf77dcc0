#include "bkern/surface.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bkern/error.hpp"
#include "bkern/parallel.hpp"

namespace bkern {

namespace {

constexpr double kPi = std::numbers::pi;

std::string describe(const ChartPoint& p) {
  return "chart " + std::to_string(p.chart) + " at (" + std::to_string(p.z.real()) + ", " +
         std::to_string(p.z.imag()) + ")";
}

// Lagrange-Gauss reduction; returns (b1, b2) with |b1| <= |b2| <= |b2 +- b1|.
std::pair<cplx, cplx> reduce_basis(cplx b1, cplx b2) {
  if (std::norm(b1) > std::norm(b2)) std::swap(b1, b2);
  for (int it = 0; it < 64; ++it) {
    double mu = std::round((b2 * std::conj(b1)).real() / std::norm(b1));
    b2 -= mu * b1;
    if (std::norm(b2) >= std::norm(b1)) break;
    std::swap(b1, b2);
  }
  return {b1, b2};
}

// 5-point Laplacian of f at z with Richardson extrapolation over (h, 2h).
template <class F>
double laplacian_richardson(F&& f, cplx z, double h) {
  auto lap = [&](double k) {
    double c = f(z);
    return (f(z + k) + f(z - k) + f(z + cplx(0, k)) + f(z - cplx(0, k)) - 4.0 * c) / (k * k);
  };
  return (4.0 * lap(h) - lap(2.0 * h)) / 3.0;
}

}  // namespace

SurfaceModel SurfaceModel::projective_line(double c, Expr perturbation) {
  if (!(c > 0.0)) throw Error(ErrorKind::Usage, "potential scale c must be positive");
  SurfaceModel s;
  s.kind_ = SurfaceKind::ProjectiveLine;
  s.c_ = c;
  s.rho_ = std::move(perturbation);
  return s;
}

SurfaceModel SurfaceModel::torus(cplx omega1, cplx omega2, double degree, Expr perturbation) {
  double cross = (std::conj(omega1) * omega2).imag();
  if (std::abs(cross) < 1e-12 * std::abs(omega1) * std::abs(omega2))
    throw Error(ErrorKind::Usage, "torus lattice generators are not independent over R");
  if (!(degree > 0.0)) throw Error(ErrorKind::Usage, "torus degree must be positive");
  SurfaceModel s;
  s.kind_ = SurfaceKind::Torus;
  s.c_ = degree;
  s.torus_degree_ = degree;
  // orient so that Im(omega2/omega1) > 0
  s.omega1_ = omega1;
  s.omega2_ = cross > 0 ? omega2 : -omega2;
  s.rho_ = std::move(perturbation);
  return s;
}

SurfaceModel SurfaceModel::square_torus(double degree) {
  double side = std::sqrt(2.0 * kPi * degree);
  return torus(cplx(side, 0.0), cplx(0.0, side), degree);
}

double SurfaceModel::degree() const {
  return kind_ == SurfaceKind::ProjectiveLine ? c_ : torus_degree_;
}

double SurfaceModel::cell_area() const {
  return std::abs((std::conj(omega1_) * omega2_).imag());
}

bool SurfaceModel::rectangular_lattice() const {
  return std::abs((std::conj(omega1_) * omega2_).real()) <= 1e-12 * std::norm(omega1_);
}

double SurfaceModel::perturbation_at(const ChartPoint& p) const {
  if (rho_.empty()) return 0.0;
  cplx z = p.z;
  if (kind_ == SurfaceKind::ProjectiveLine && p.chart == 1) {
    z = std::abs(p.z) < 1e-150 ? cplx(1e150, 0.0) : 1.0 / p.z;
  }
  return rho_(z.real(), z.imag());
}

double SurfaceModel::potential(const ChartPoint& p) const {
  if (kind_ == SurfaceKind::ProjectiveLine) {
    return c_ * std::log1p(std::norm(p.z)) + perturbation_at(p);
  }
  cplx zeta = p.z / omega1_;
  double y = zeta.imag();
  return 2.0 * kPi * torus_degree_ * y * y / tau().imag() + perturbation_at(p);
}

ChartPoint SurfaceModel::normalize(const ChartPoint& p) const {
  if (kind_ == SurfaceKind::ProjectiveLine) {
    if (std::abs(p.z) <= kOwnRadius) return p;
    return {1 - p.chart, 1.0 / p.z};
  }
  cplx zeta = p.z / omega1_;
  cplx t = tau();
  double b = zeta.imag() / t.imag();
  double a = zeta.real() - b * t.real();
  a -= std::floor(a);
  b -= std::floor(b);
  return {0, omega1_ * (a + b * t)};
}

ChartPoint SurfaceModel::to_chart(const ChartPoint& p, int chart) const {
  if (kind_ == SurfaceKind::Torus || p.chart == chart) return p;
  if (std::abs(p.z) == 0.0)
    throw Error(ErrorKind::ChartBoundary, "point at infinity of the other chart: " + describe(p));
  return {chart, 1.0 / p.z};
}

bool SurfaceModel::in_chart_domain(const ChartPoint& p) const {
  if (kind_ == SurfaceKind::Torus) return true;
  return std::abs(p.z) <= kChartRadius * (1.0 + 1e-12);
}

std::vector<Chart> SurfaceModel::charts(int resolution) const {
  if (kind_ == SurfaceKind::ProjectiveLine) {
    return {Chart{0, kChartRadius, kOwnRadius, {}, {}, resolution},
            Chart{1, kChartRadius, kOwnRadius, {}, {}, resolution}};
  }
  return {Chart{0, 0.0, 0.0, omega1_, omega2_, resolution}};
}

double metric_density(const SurfaceModel& surface, const ChartPoint& p) {
  double g;
  if (surface.is_projective_line()) {
    double q = 1.0 + std::norm(p.z);
    g = surface.scale() / (q * q);
  } else {
    g = kPi * surface.degree() / surface.cell_area();
  }
  if (surface.perturbed()) {
    auto rho = [&](cplx z) { return surface.perturbation_at({p.chart, z}); };
    g += 0.25 * laplacian_richardson(rho, p.z, 1e-3);
  }
  if (!(g > 0.0)) {
    throw Error(ErrorKind::PositivityViolation,
                "metric density " + std::to_string(g) + " at " + describe(p));
  }
  return g;
}

cplx log_density_gradient(const SurfaceModel& surface, const ChartPoint& p) {
  if (!surface.perturbed()) {
    if (!surface.is_projective_line()) return {0.0, 0.0};
    return -4.0 * p.z / (1.0 + std::norm(p.z));
  }
  const double h = 1e-4;
  auto lg = [&](cplx z) { return std::log(metric_density(surface, {p.chart, z})); };
  return {(lg(p.z + h) - lg(p.z - h)) / (2 * h),
          (lg(p.z + cplx(0, h)) - lg(p.z - cplx(0, h))) / (2 * h)};
}

double ricci_ratio_fd(const SurfaceModel& surface, const ChartPoint& p, double h) {
  if (surface.is_projective_line() && std::abs(p.z) + 2.0 * h > kChartRadius) {
    throw Error(ErrorKind::ChartBoundary, "curvature stencil leaves the chart at " + describe(p));
  }
  auto lg = [&](cplx z) { return std::log(metric_density(surface, {p.chart, z})); };
  double lap = laplacian_richardson(lg, p.z, h);
  return -lap / (4.0 * metric_density(surface, p));
}

double ricci_ratio(const SurfaceModel& surface, const ChartPoint& p) {
  if (!surface.perturbed()) {
    if (surface.is_projective_line() && !surface.in_chart_domain(p)) {
      throw Error(ErrorKind::ChartBoundary, "point outside the chart: " + describe(p));
    }
    return surface.is_projective_line() ? 2.0 / surface.scale() : 0.0;
  }
  return ricci_ratio_fd(surface, p);
}

std::vector<ChartPoint> sample_nodes(const SurfaceModel& surface, int per_axis) {
  std::vector<ChartPoint> nodes;
  if (surface.is_projective_line()) {
    int nr = std::max(2, per_axis / 2);
    for (int chart = 0; chart < 2; ++chart) {
      if (chart == 0) nodes.push_back({0, {0.0, 0.0}});
      for (int i = 0; i < nr; ++i) {
        double r = (i + 0.5) / nr;
        for (int j = 0; j < per_axis; ++j) {
          double a = 2.0 * kPi * j / per_axis;
          nodes.push_back({chart, std::polar(r, a)});
        }
      }
    }
    return nodes;
  }
  cplx t = surface.tau();
  for (int i = 0; i < per_axis; ++i)
    for (int j = 0; j < per_axis; ++j)
      nodes.push_back({0, surface.omega1() * (double(i) / per_axis + double(j) / per_axis * t)});
  return nodes;
}

double sectional_upper_bound(const SurfaceModel& surface, int per_axis) {
  if (!surface.perturbed()) return surface.is_projective_line() ? 2.0 / surface.scale() : 0.0;
  auto nodes = sample_nodes(surface, per_axis);
  std::vector<double> r(nodes.size());
  parallel_for(std::ptrdiff_t(nodes.size()), [&](std::ptrdiff_t i) { r[i] = ricci_ratio_fd(surface, nodes[i]); });
  return *std::max_element(r.begin(), r.end());
}

double shortest_lattice_vector(cplx omega1, cplx omega2) {
  return std::abs(reduce_basis(omega1, omega2).first);
}

double model_L0(const SurfaceModel& surface) {
  if (surface.perturbed()) {
    if (auto l0 = surface.certified_L0()) return *l0;
    throw Error(ErrorKind::Unsupported,
                "L0 is only available for unperturbed models or with a certified value");
  }
  if (surface.is_projective_line()) return kPi * std::sqrt(2.0 * surface.scale());
  double g = metric_density(surface, {0, {0.0, 0.0}});
  return std::sqrt(2.0 * g) * shortest_lattice_vector(surface.omega1(), surface.omega2());
}

InjectivityBracket klingenberg_bounds(const SurfaceModel& surface) {
  double L0 = model_L0(surface);
  double kmax = sectional_upper_bound(surface);
  double lower = L0 / 2.0;
  if (kmax > 0.0) lower = std::min(lower, kPi / std::sqrt(kmax));
  return {lower, L0 / 2.0};
}

std::array<double, 3> to_unit_sphere(const ChartPoint& p) {
  double n = std::norm(p.z);
  double q = 1.0 + n;
  if (p.chart == 0) return {2.0 * p.z.real() / q, 2.0 * p.z.imag() / q, (n - 1.0) / q};
  // z = 1/w: 2z/(1+|z|^2) = 2 conj(w)/(1+|w|^2)
  return {2.0 * p.z.real() / q, -2.0 * p.z.imag() / q, (1.0 - n) / q};
}

ChartPoint from_unit_sphere(const std::array<double, 3>& v) {
  if (v[2] <= 0.0) return {0, cplx(v[0], v[1]) / (1.0 - v[2])};
  return {1, cplx(v[0], -v[1]) / (1.0 + v[2])};
}

double model_distance(const SurfaceModel& surface, const ChartPoint& a, const ChartPoint& b) {
  if (surface.perturbed())
    throw Error(ErrorKind::Unsupported, "closed-form distance needs an unperturbed model");
  if (surface.is_projective_line()) {
    auto u = to_unit_sphere(a);
    auto v = to_unit_sphere(b);
    double dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    double cx = u[1] * v[2] - u[2] * v[1];
    double cy = u[2] * v[0] - u[0] * v[2];
    double cz = u[0] * v[1] - u[1] * v[0];
    double angle = std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), dot);
    return std::sqrt(surface.scale() / 2.0) * angle;
  }
  auto [b1, b2] = reduce_basis(surface.omega1(), surface.omega2());
  cplx d = surface.normalize({0, a.z - b.z}).z;
  // express in the reduced basis and bring near the origin
  double det = (std::conj(b1) * b2).imag();
  double s = (std::conj(d) * b2).imag() / det;
  double t = (std::conj(b1) * d).imag() / det;
  d -= std::round(s) * b1 + std::round(t) * b2;
  double best = std::abs(d);
  for (int i = -2; i <= 2; ++i)
    for (int j = -2; j <= 2; ++j) best = std::min(best, std::abs(d + double(i) * b1 + double(j) * b2));
  return std::sqrt(2.0 * metric_density(surface, {0, {0.0, 0.0}})) * best;
}

PolarChart::PolarChart(const SurfaceModel& surface, const ChartPoint& centre)
    : surface_(surface), centre_(centre) {
  if (!surface.is_projective_line())
    throw Error(ErrorKind::Unsupported, "log-polar sphere chart needs P^1");
  // rotation taking the south pole (z = 0) to the centre
  std::array<double, 3> a{0.0, 0.0, -1.0};
  auto b = to_unit_sphere(centre);
  double c = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
  std::array<double, 3> k{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
                          a[0] * b[1] - a[1] * b[0]};
  double s = std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
  if (s < 1e-14) {
    if (c > 0) {
      rot_ = {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
    } else {
      rot_ = {{{1, 0, 0}, {0, -1, 0}, {0, 0, -1}}};
    }
    return;
  }
  for (auto& x : k) x /= s;
  // Rodrigues: R = I + sin K + (1 - cos) K^2
  std::array<std::array<double, 3>, 3> K{{{0, -k[2], k[1]}, {k[2], 0, -k[0]}, {-k[1], k[0], 0}}};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double k2 = 0;
      for (int l = 0; l < 3; ++l) k2 += K[i][l] * K[l][j];
      rot_[i][j] = (i == j ? 1.0 : 0.0) + s * K[i][j] + (1.0 - c) * k2;
    }
  }
}

ChartPoint PolarChart::point(double s, double theta) const {
  cplx w = std::exp(cplx(s, theta));
  auto v = s > 0 ? to_unit_sphere({1, 1.0 / w}) : to_unit_sphere({0, w});
  std::array<double, 3> r{};
  for (int i = 0; i < 3; ++i) r[i] = rot_[i][0] * v[0] + rot_[i][1] * v[1] + rot_[i][2] * v[2];
  return from_unit_sphere(r);
}

double PolarChart::area_density(double s, double theta) const {
  ChartPoint p = point(s, theta);
  double g = metric_density(surface_, p);
  // |dz/dw| = (1+|z|^2)/(1+|w|^2) for a round rotation; |w|^2/(1+|w|^2)^2 = 1/(4 cosh^2 s)
  double ch = std::cosh(s);
  double q = 1.0 + std::norm(p.z);
  return 2.0 * g * q * q / (4.0 * ch * ch);
}

}  // namespace bkern
