#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Sparse>

#include "bkern/parallel.hpp"

namespace bkern {

// Find v >= 0 with w = M v + q >= 0 and v . w = 0, for M symmetric positive
// semidefinite with a positive diagonal and nonpositive off-diagonal (M-matrix
// pattern of a discrete -Laplacian). M may be singular on constants; at least one
// contact is then forced.
struct LcpProblem {
  Eigen::SparseMatrix<double, Eigen::RowMajor> M;
  Eigen::VectorXd q;
  std::vector<std::uint8_t> color;  // two-colouring: no two coupled unknowns share a colour
};

struct LcpOptions {
  double tolerance = 1e-8;  // on residuals scaled by max |q|
  int max_sweeps = 400;     // projected SOR warm start
  double relaxation = 1.8;
  int max_active_set_iterations = 200;
  Execution exec = Execution::Parallel;
};

struct LcpResult {
  Eigen::VectorXd v, w;
  int sweeps = 0;
  int active_set_iterations = 0;
  double obstacle_residual = 0.0;        // max(-v)+
  double dual_residual = 0.0;            // max(-w)+
  double complementarity_residual = 0.0; // max |min(v, w)|
  std::vector<double> history;           // residual after each active-set step
  int contact_count = 0;
  bool converged = false;
};

// One red-black projected SOR sweep (both colours). Serial and parallel paths
// give identical iterates.
void psor_sweep(const LcpProblem& p, Eigen::VectorXd& v, double relaxation, Execution exec);

// With an initial guess the active-set phase starts from its contact set (after
// the warm-start sweeps); otherwise from a single contact node.
LcpResult solve_lcp(const LcpProblem& p, const LcpOptions& opt = {},
                    const Eigen::VectorXd* initial = nullptr);

}  // namespace bkern
