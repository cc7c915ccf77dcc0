#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bkern/sections.hpp"

namespace bkern {

using PointFunction = std::function<double(const ChartPoint&)>;

// H = S^H S with S the sampled basis rows.
Eigen::MatrixXcd gram_matrix(const SampledBasis& s, Execution exec = Execution::Parallel);

// Orthonormalized evaluation of a section basis.
//   plain twist:     value(x) = B_{m phi}(x)
//   canonical twist: value(x) = (K_{m phi} / MA_{m phi})(x)
// An optional weight modifier w replaces e^{-m phi} by e^{-m phi - w}.
class KernelEvaluator {
 public:
  KernelEvaluator(SectionBasis basis, Quadrature q, PointFunction weight_modifier = {},
                  Execution exec = Execution::Parallel);

  double value(const ChartPoint& x) const;
  // Evaluations at many points.
  std::vector<double> values(const std::vector<ChartPoint>& xs, Execution exec = Execution::Parallel) const;

  const SectionBasis& basis() const { return basis_; }
  const Quadrature& quadrature() const { return quad_; }
  const Eigen::MatrixXcd& gram() const { return gram_; }
  const Eigen::MatrixXcd& factor() const { return factor_; }
  double condition_number() const { return cond_; }
  // ||L L^H - H|| / ||H|| (Frobenius)
  double factor_residual() const;
  // int value * MA_{m phi} over the supplied quadrature; equals the dimension.
  double trace_integral(const Quadrature& q) const;

 private:
  SectionBasis basis_;
  Quadrature quad_;
  PointFunction modifier_;
  Eigen::MatrixXcd gram_, factor_;
  double cond_ = 0.0;
};

inline constexpr double kMaxCondition = 1e12;

double kernel_B(const SurfaceModel& surface, int m, const ChartPoint& x, int resolution);
double kernel_K_ratio(const SurfaceModel& surface, int m, const ChartPoint& x, int resolution);

struct KernelExtremes {
  double min = 0.0, max = 0.0;
  ChartPoint argmin;
};
KernelExtremes kernel_extremes(const KernelEvaluator& k, const std::vector<ChartPoint>& nodes);

struct TianRow {
  int m = 0;
  double min_B = 0, max_B = 0;
  std::optional<double> min_ratio, max_ratio;  // empty when H0(K_X + mL) = 0
  double deviation_B = 0;                      // max |2 pi B - 1|
  std::optional<double> deviation_ratio;
};
std::vector<TianRow> tian_table(const SurfaceModel& surface, std::vector<int> m_list, int resolution,
                                int sample_per_axis = 12);

struct DeformedRow {
  double t = 0.0;
  double value = 0.0;  // e^t K_{phi^t}(x) / MA_phi(x)
  int refined_cells = 0;
  std::string warning;
};
// Canonical kernel with weight e^{-phi - lambda max(G - t, 0)}, at level m = 1.
std::vector<DeformedRow> deformed_kernel_curve(const SurfaceModel& surface, const ChartPoint& x,
                                               const PointFunction& G, double lambda,
                                               const std::vector<double>& t_list, int resolution,
                                               int refine_depth = 3);

// chart,re,im,value
void write_kernel_csv(std::ostream& os, const std::vector<ChartPoint>& nodes,
                      const std::vector<double>& values);

}  // namespace bkern
