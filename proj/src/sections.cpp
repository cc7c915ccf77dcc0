#include "bkern/sections.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include "bkern/error.hpp"
#include "bkern/quadrature_rules.hpp"

namespace bkern {

namespace {

constexpr double kPi = std::numbers::pi;

int integral_degree(double v, const char* what) {
  long r = std::lround(v);
  if (std::abs(v - double(r)) > 1e-9) {
    throw Error(ErrorKind::Unsupported, std::string(what) + " must be an integer, got " + std::to_string(v));
  }
  return int(r);
}

}  // namespace

const char* to_string(Twist t) { return t == Twist::Plain ? "plain" : "canonical"; }

Quadrature build_quadrature(const SurfaceModel& surface, int resolution) {
  if (resolution < 16) throw Error(ErrorKind::Usage, "quadrature resolution must be at least 16");
  Quadrature q;
  q.kind = surface.kind();
  q.resolution = resolution;
  if (surface.is_projective_line()) {
    const auto& gl = gauss_legendre(8);
    int panels = resolution / 16;
    double dr = 1.0 / panels;
    double dth = 2.0 * kPi / resolution;
    for (int chart = 0; chart < 2; ++chart) {
      for (int p = 0; p < panels; ++p) {
        for (int k = 0; k < resolution; ++k) {
          double th = (k + 0.5) * dth;
          QuadCell cell{chart, p * dr, (p + 1) * dr, th - 0.5 * dth, th + 0.5 * dth, int(q.nodes.size()), 8};
          for (int i = 0; i < 8; ++i) {
            double r = (p + 0.5 * (gl.x[i] + 1.0)) * dr;
            q.nodes.push_back({chart, std::polar(r, th)});
            q.weights.push_back(0.5 * dr * gl.w[i] * r * dth);
          }
          q.cells.push_back(cell);
        }
      }
    }
    return q;
  }
  int n = resolution;
  double w = surface.cell_area() / (double(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      double a = double(i) / n, b = double(j) / n;
      q.cells.push_back({0, a - 0.5 / n, a + 0.5 / n, b - 0.5 / n, b + 0.5 / n, int(q.nodes.size()), 1});
      q.nodes.push_back({0, a * surface.omega1() + b * surface.omega2()});
      q.weights.push_back(w);
    }
  }
  return q;
}

Quadrature refine_near_level(const SurfaceModel& surface, const Quadrature& q,
                             const std::function<double(const ChartPoint&)>& field, double level,
                             int depth, int* refined_cells) {
  const bool p1 = surface.is_projective_line();
  auto map = [&](int chart, double a, double b) -> ChartPoint {
    if (p1) return {chart, std::polar(a, b)};
    return {0, a * surface.omega1() + b * surface.omega2()};
  };
  auto jac = [&](double a) { return p1 ? a : surface.cell_area(); };

  Quadrature out;
  out.kind = q.kind;
  out.resolution = q.resolution;
  const auto& gl = gauss_legendre(4);
  int count = 0;
  for (const auto& cell : q.cells) {
    double lo = 1e300, hi = -1e300;
    auto probe = [&](const ChartPoint& p) {
      double v = field(p) - level;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    };
    for (int k = 0; k < cell.count; ++k) probe(q.nodes[cell.first + k]);
    for (double a : {cell.a0, cell.a1})
      for (double b : {cell.b0, cell.b1}) probe(map(cell.chart, a, b));
    if (!(lo < 0.0 && hi > 0.0) || depth <= 0) {
      QuadCell c = cell;
      c.first = int(out.nodes.size());
      for (int k = 0; k < cell.count; ++k) {
        out.nodes.push_back(q.nodes[cell.first + k]);
        out.weights.push_back(q.weights[cell.first + k]);
      }
      out.cells.push_back(c);
      continue;
    }
    ++count;
    int sub = 1 << depth;
    double da = (cell.a1 - cell.a0) / sub, db = (cell.b1 - cell.b0) / sub;
    for (int sa = 0; sa < sub; ++sa) {
      for (int sb = 0; sb < sub; ++sb) {
        QuadCell c{cell.chart, cell.a0 + sa * da, cell.a0 + (sa + 1) * da, cell.b0 + sb * db,
                   cell.b0 + (sb + 1) * db, int(out.nodes.size()), 16};
        for (int i = 0; i < 4; ++i) {
          double a = c.a0 + 0.5 * (gl.x[i] + 1.0) * da;
          for (int k = 0; k < 4; ++k) {
            double b = c.b0 + 0.5 * (gl.x[k] + 1.0) * db;
            out.nodes.push_back(map(cell.chart, a, b));
            out.weights.push_back(0.25 * da * db * gl.w[i] * gl.w[k] * jac(a));
          }
        }
        out.cells.push_back(c);
      }
    }
  }
  if (refined_cells) *refined_cells = count;
  return out;
}

double integrate_area(const SurfaceModel& surface, const Quadrature& q,
                      const std::function<double(const ChartPoint&)>& f) {
  std::vector<double> part(q.size());
  parallel_for(std::ptrdiff_t(q.size()), [&](std::ptrdiff_t k) {
    part[k] = q.weights[k] * 2.0 * metric_density(surface, q.nodes[k]) * f(q.nodes[k]);
  });
  double acc = 0.0;
  for (double v : part) acc += v;
  return acc;
}

SectionBasis SectionBasis::build(const SurfaceModel& surface, int m, Twist twist) {
  if (m < 1) throw Error(ErrorKind::Usage, "level m must be at least 1");
  SectionBasis b;
  b.surface_ = surface;
  b.m_ = m;
  b.twist_ = twist;
  if (surface.is_projective_line()) {
    int d = integral_degree(m * surface.scale(), "m c");
    if (twist == Twist::Canonical) {
      if (d < 2) {
        throw Error(ErrorKind::EmptySpace,
                    "H0(K_X + mL) = 0 on P^1 when m c < 2 (m c = " + std::to_string(d) + ")");
      }
      d -= 2;
    }
    b.poly_degree_ = d;
    b.dim_ = d + 1;
    b.weight_power_ = 0.5 * m * surface.scale();
    b.binom_.resize(d + 1);
    for (int k = 0; k <= d; ++k) {
      b.binom_[k] = std::sqrt(std::exp(std::lgamma(d + 1.0) - std::lgamma(k + 1.0) - std::lgamma(d - k + 1.0)));
    }
  } else {
    b.level_N_ = integral_degree(m * surface.degree(), "m D");
    if (b.level_N_ < 1) throw Error(ErrorKind::EmptySpace, "m D must be positive");
    b.dim_ = b.level_N_;
  }
  return b;
}

void SectionBasis::weighted_values(const ChartPoint& p, cplx* out) const {
  double damp = surface_.perturbed() ? std::exp(-0.5 * m_ * surface_.perturbation_at(p)) : 1.0;
  if (surface_.is_projective_line()) {
    cplx z = p.z;
    double base = damp * std::pow(1.0 + std::norm(z), -weight_power_);
    int d = poly_degree_;
    // chart 1 carries w^{d-k}
    cplx pw = 1.0;
    for (int e = 0; e <= d; ++e) {
      int k = p.chart == 0 ? e : d - e;
      out[k] = binom_[k] * base * pw;
      pw *= z;
    }
    return;
  }
  const int N = level_N_;
  cplx zeta = p.z / surface_.omega1();
  cplx tau = surface_.tau();
  double x = zeta.real(), y = zeta.imag(), it = tau.imag(), rt = tau.real();
  double R = std::sqrt(0.25 * it * it + 40.0 * it / (kPi * N)) / it + 1.0;
  for (int j = 0; j < N; ++j) {
    double centre = -y / it - double(j) / N;
    long n0 = long(std::ceil(centre - R)), n1 = long(std::floor(centre + R));
    cplx acc = 0.0;
    for (long n = n0; n <= n1; ++n) {
      double k = double(n) + double(j) / N;
      double e = k * it + y;
      double re = -kPi * N / it * e * e;
      // phases reduced modulo 2 pi via the integer parts
      double ph = kPi * N * rt * k * k + 2.0 * kPi * N * k * x;
      acc += std::polar(std::exp(re), std::remainder(ph, 2.0 * kPi));
    }
    out[j] = damp * acc;
  }
}

Eigen::VectorXcd SectionBasis::weighted_values(const ChartPoint& p) const {
  Eigen::VectorXcd v(dim_);
  weighted_values(p, v.data());
  return v;
}

double SectionBasis::monge_ampere(const ChartPoint& p) const {
  return 2.0 * m_ * metric_density(surface_, p);
}

double SectionBasis::measure_density(const ChartPoint& p) const {
  return twist_ == Twist::Plain ? monge_ampere(p) : 2.0;
}

SampledBasis sample_basis(const SectionBasis& basis, const Quadrature& q, Execution exec) {
  SampledBasis s;
  s.rows.resize(Eigen::Index(q.size()), basis.dimension());
  Eigen::MatrixXcd cols(basis.dimension(), Eigen::Index(q.size()));
  parallel_for(
      std::ptrdiff_t(q.size()),
      [&](std::ptrdiff_t k) {
        double f = std::sqrt(q.weights[k] * basis.measure_density(q.nodes[k]));
        basis.weighted_values(q.nodes[k], cols.col(k).data());
        cols.col(k) *= f;
      },
      exec);
  s.rows = cols.transpose();
  return s;
}

cplx inner_product(const SectionBasis& bu, const Eigen::VectorXcd& u, const SectionBasis& bv,
                   const Eigen::VectorXcd& v, const Quadrature& q) {
  if (bu.twist() != bv.twist() || bu.level() != bv.level()) {
    throw Error(ErrorKind::Usage, "inner product of sections with different twist or level");
  }
  if (u.size() != bu.dimension() || v.size() != bv.dimension()) {
    throw Error(ErrorKind::Usage, "coefficient vector does not match basis dimension");
  }
  std::vector<cplx> part(q.size());
  parallel_for(std::ptrdiff_t(q.size()), [&](std::ptrdiff_t k) {
    Eigen::VectorXcd su = bu.weighted_values(q.nodes[k]);
    Eigen::VectorXcd sv = bv.weighted_values(q.nodes[k]);
    cplx a = su.transpose() * u, b = sv.transpose() * v;
    part[k] = q.weights[k] * bu.measure_density(q.nodes[k]) * a * std::conj(b);
  });
  cplx acc = 0.0;
  for (auto c : part) acc += c;
  return acc;
}

void write_basis_csv(std::ostream& os, const SectionBasis& basis, const Quadrature& q) {
  os << "node,chart,re,im,k,re_value,im_value\n";
  std::vector<cplx> v(basis.dimension());
  for (std::size_t n = 0; n < q.size(); ++n) {
    basis.weighted_values(q.nodes[n], v.data());
    for (int k = 0; k < basis.dimension(); ++k) {
      os << n << ',' << q.nodes[n].chart << ',' << q.nodes[n].z.real() << ',' << q.nodes[n].z.imag()
         << ',' << k << ',' << v[k].real() << ',' << v[k].imag() << '\n';
    }
  }
}

}  // namespace bkern
