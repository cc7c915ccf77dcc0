#include "bkern/bergman.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "bkern/error.hpp"

namespace bkern {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kGramChunks = 64;

}  // namespace

Eigen::MatrixXcd gram_matrix(const SampledBasis& s, Execution exec) {
  const auto& S = s.rows;
  const Eigen::Index n = S.rows(), d = S.cols();
  if (exec == Execution::Serial) {
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(d, d);
    for (Eigen::Index k = 0; k < n; ++k) {
      for (Eigen::Index j = 0; j < d; ++j) {
        cplx a = std::conj(S(k, j));
        for (Eigen::Index l = 0; l < d; ++l) H(j, l) += a * S(k, l);
      }
    }
    return H;
  }
  // fixed chunking keeps the summation order independent of the thread count
  std::vector<Eigen::MatrixXcd> part(kGramChunks);
  parallel_for(kGramChunks, [&](std::ptrdiff_t c) {
    Eigen::Index lo = n * c / kGramChunks, hi = n * (c + 1) / kGramChunks;
    auto block = S.middleRows(lo, hi - lo);
    part[c] = block.adjoint() * block;
  });
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(d, d);
  for (const auto& p : part) H += p;
  return H;
}

KernelEvaluator::KernelEvaluator(SectionBasis basis, Quadrature q, PointFunction weight_modifier,
                                 Execution exec)
    : basis_(std::move(basis)), quad_(std::move(q)), modifier_(std::move(weight_modifier)) {
  SampledBasis s = sample_basis(basis_, quad_, exec);
  if (modifier_) {
    parallel_for(
        s.rows.rows(),
        [&](std::ptrdiff_t k) { s.rows.row(k) *= std::exp(-0.5 * modifier_(quad_.nodes[k])); }, exec);
  }
  gram_ = gram_matrix(s, exec);
  gram_ = 0.5 * (gram_ + gram_.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram_, Eigen::EigenvaluesOnly);
  double lo = eig.eigenvalues().minCoeff(), hi = eig.eigenvalues().maxCoeff();
  cond_ = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  if (!(cond_ < kMaxCondition)) {
    throw Error(ErrorKind::Conditioning, "Gram matrix condition number " + std::to_string(cond_));
  }
  Eigen::LLT<Eigen::MatrixXcd> llt(gram_);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::Conditioning, "Cholesky factorization failed, condition number " + std::to_string(cond_));
  }
  factor_ = llt.matrixL();
}

double KernelEvaluator::value(const ChartPoint& x) const {
  Eigen::VectorXcd v = basis_.weighted_values(x).conjugate();
  factor_.triangularView<Eigen::Lower>().solveInPlace(v);
  double b = v.squaredNorm();
  if (modifier_) b *= std::exp(-modifier_(x));
  if (basis_.twist() == Twist::Canonical) b /= basis_.level() * metric_density(basis_.surface(), x);
  return b;
}

std::vector<double> KernelEvaluator::values(const std::vector<ChartPoint>& xs, Execution exec) const {
  std::vector<double> out(xs.size());
  parallel_for(std::ptrdiff_t(xs.size()), [&](std::ptrdiff_t k) { out[k] = value(xs[k]); }, exec);
  return out;
}

double KernelEvaluator::factor_residual() const {
  return (factor_ * factor_.adjoint() - gram_).norm() / gram_.norm();
}

double KernelEvaluator::trace_integral(const Quadrature& q) const {
  std::vector<double> part(q.size());
  parallel_for(std::ptrdiff_t(q.size()), [&](std::ptrdiff_t k) {
    part[k] = q.weights[k] * basis_.monge_ampere(q.nodes[k]) * value(q.nodes[k]);
  });
  double acc = 0.0;
  for (double v : part) acc += v;
  return acc;
}

double kernel_B(const SurfaceModel& surface, int m, const ChartPoint& x, int resolution) {
  KernelEvaluator k(SectionBasis::build(surface, m, Twist::Plain), build_quadrature(surface, resolution));
  return k.value(x);
}

double kernel_K_ratio(const SurfaceModel& surface, int m, const ChartPoint& x, int resolution) {
  KernelEvaluator k(SectionBasis::build(surface, m, Twist::Canonical), build_quadrature(surface, resolution));
  return k.value(x);
}

KernelExtremes kernel_extremes(const KernelEvaluator& k, const std::vector<ChartPoint>& nodes) {
  auto v = k.values(nodes);
  KernelExtremes e;
  auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  e.min = *lo;
  e.max = *hi;
  e.argmin = nodes[lo - v.begin()];
  return e;
}

std::vector<TianRow> tian_table(const SurfaceModel& surface, std::vector<int> m_list, int resolution,
                                int sample_per_axis) {
  if (m_list.empty()) throw Error(ErrorKind::Usage, "empty level list");
  std::sort(m_list.begin(), m_list.end());
  auto quad = build_quadrature(surface, resolution);
  auto nodes = sample_nodes(surface, sample_per_axis);
  std::vector<TianRow> rows;
  for (int m : m_list) {
    TianRow r;
    r.m = m;
    KernelEvaluator b(SectionBasis::build(surface, m, Twist::Plain), quad);
    auto vb = b.values(nodes);
    r.min_B = *std::min_element(vb.begin(), vb.end());
    r.max_B = *std::max_element(vb.begin(), vb.end());
    for (double v : vb) r.deviation_B = std::max(r.deviation_B, std::abs(kTwoPi * v - 1.0));
    try {
      KernelEvaluator k(SectionBasis::build(surface, m, Twist::Canonical), quad);
      auto vk = k.values(nodes);
      r.min_ratio = *std::min_element(vk.begin(), vk.end());
      r.max_ratio = *std::max_element(vk.begin(), vk.end());
      double dev = 0.0;
      for (double v : vk) dev = std::max(dev, std::abs(kTwoPi * v - 1.0));
      r.deviation_ratio = dev;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::EmptySpace) throw;
    }
    rows.push_back(r);
  }
  return rows;
}

std::vector<DeformedRow> deformed_kernel_curve(const SurfaceModel& surface, const ChartPoint& x,
                                               const PointFunction& G, double lambda,
                                               const std::vector<double>& t_list, int resolution,
                                               int refine_depth) {
  if (!(lambda > 0.0)) throw Error(ErrorKind::Usage, "lambda must be positive");
  auto base = build_quadrature(surface, resolution);
  auto basis = SectionBasis::build(surface, 1, Twist::Canonical);
  std::vector<DeformedRow> rows;
  for (double t : t_list) {
    if (t > 0.0) throw Error(ErrorKind::Usage, "deformation levels must be <= 0");
    DeformedRow row;
    row.t = t;
    auto q = refine_near_level(surface, base, G, t, refine_depth, &row.refined_cells);
    auto modifier = [&G, lambda, t](const ChartPoint& p) {
      double g = G(p);
      return g > t ? lambda * (g - t) : 0.0;
    };
    KernelEvaluator k(basis, std::move(q), modifier);
    row.value = std::exp(t) * k.value(x);
    // level circles thinner than a refined cell are not resolved
    double cell = 2.0 * std::numbers::pi / resolution / (1 << refine_depth);
    if (row.refined_cells > 0 && row.refined_cells < 8) {
      row.warning = "level set {G = t} meets fewer than 8 cells; kink under-resolved";
    } else if (t < 2.0 * std::log(cell)) {
      row.warning = "level below quadrature resolution";
    }
    rows.push_back(row);
  }
  return rows;
}

void write_kernel_csv(std::ostream& os, const std::vector<ChartPoint>& nodes,
                      const std::vector<double>& values) {
  os << "chart,re,im,value\n";
  os.precision(17);
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    os << nodes[k].chart << ',' << nodes[k].z.real() << ',' << nodes[k].z.imag() << ',' << values[k] << '\n';
  }
}

}  // namespace bkern
