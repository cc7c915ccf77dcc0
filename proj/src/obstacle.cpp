#include "bkern/obstacle.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SparseCholesky>

#include "bkern/error.hpp"

namespace bkern {

namespace {

using RowMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct Residuals {
  double obstacle = 0, dual = 0, comp = 0;
  double max() const { return std::max({obstacle, dual, comp}); }
};

Residuals residuals(const Eigen::VectorXd& v, const Eigen::VectorXd& w, double scale) {
  Residuals r;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    r.obstacle = std::max(r.obstacle, -v[i]);
    r.dual = std::max(r.dual, -w[i] / scale);
    r.comp = std::max(r.comp, std::abs(std::min(v[i], w[i] / scale)));
  }
  return r;
}

}  // namespace

void psor_sweep(const LcpProblem& p, Eigen::VectorXd& v, double relaxation, Execution exec) {
  const RowMat& M = p.M;
  for (std::uint8_t c = 0; c < 2; ++c) {
    parallel_for(
        M.rows(),
        [&](std::ptrdiff_t i) {
          if (p.color[i] != c) return;
          double r = p.q[i], d = 0.0;
          for (RowMat::InnerIterator it(M, i); it; ++it) {
            r += it.value() * v[it.col()];
            if (it.col() == i) d = it.value();
          }
          v[i] = std::max(0.0, v[i] - relaxation * r / d);
        },
        exec);
  }
}

LcpResult solve_lcp(const LcpProblem& p, const LcpOptions& opt, const Eigen::VectorXd* initial) {
  const Eigen::Index n = p.M.rows();
  if (p.q.size() != n || Eigen::Index(p.color.size()) != n) {
    throw Error(ErrorKind::Usage, "LCP data sizes do not match");
  }
  double scale = std::max(1.0, p.q.cwiseAbs().maxCoeff());
  LcpResult res;
  Eigen::VectorXd v = initial ? *initial : Eigen::VectorXd::Zero(n);
  v = v.cwiseMax(0.0);
  for (res.sweeps = 0; res.sweeps < opt.max_sweeps; ++res.sweeps) {
    psor_sweep(p, v, opt.relaxation, opt.exec);
  }

  Eigen::VectorXd w = p.M * v + p.q;
  Eigen::VectorXd row_sums = p.M * Eigen::VectorXd::Ones(n);
  const bool singular =
      row_sums.cwiseAbs().maxCoeff() <= 1e-12 * p.M.diagonal().cwiseAbs().maxCoeff();
  std::vector<std::uint8_t> active(n, 0);
  if (initial) {
    for (Eigen::Index i = 0; i < n; ++i) active[i] = v[i] <= 0.0;
  } else {
    // one contact node: entering is done in bulk, releasing one layer at a time
    Eigen::Index k = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (v[i] <= 0.0 && w[i] > best) {
        best = w[i];
        k = i;
      }
    }
    active[k] = 1;
  }

  for (int it = 0; it < opt.max_active_set_iterations; ++it) {
    if (singular && std::none_of(active.begin(), active.end(), [](auto a) { return a; })) {
      Eigen::Index k;
      v.minCoeff(&k);
      active[k] = 1;
    }
    std::vector<Eigen::Index> free_index(n, -1), free_nodes;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!active[i]) {
        free_index[i] = Eigen::Index(free_nodes.size());
        free_nodes.push_back(i);
      }
    }
    Eigen::VectorXd vn = Eigen::VectorXd::Zero(n);
    if (!free_nodes.empty()) {
      std::vector<Eigen::Triplet<double>> trip;
      trip.reserve(free_nodes.size() * 5);
      Eigen::VectorXd rhs(free_nodes.size());
      for (std::size_t k = 0; k < free_nodes.size(); ++k) {
        Eigen::Index i = free_nodes[k];
        rhs[k] = -p.q[i];
        for (RowMat::InnerIterator e(p.M, i); e; ++e) {
          Eigen::Index j = free_index[e.col()];
          if (j >= 0) trip.emplace_back(Eigen::Index(k), j, e.value());
        }
      }
      Eigen::SparseMatrix<double> A(rhs.size(), rhs.size());
      A.setFromTriplets(trip.begin(), trip.end());
      Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
      if (ldlt.info() != Eigen::Success) {
        throw Error(ErrorKind::SolverFailure, "active-set factorization failed");
      }
      Eigen::VectorXd sol = ldlt.solve(rhs);
      for (std::size_t k = 0; k < free_nodes.size(); ++k) vn[free_nodes[k]] = sol[k];
    }
    v = vn;
    w = p.M * v + p.q;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!active[i]) w[i] = 0.0;
    }
    ++res.active_set_iterations;
    Residuals r = residuals(v, w, scale);
    res.history.push_back(r.max());

    bool changed = false;
    std::vector<std::uint8_t> next(n);
    double enter = 1e-12 * std::max(1.0, v.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < n; ++i) {
      next[i] = active[i] ? (w[i] >= -opt.tolerance * scale) : (v[i] < enter);
      changed = changed || next[i] != active[i];
    }
    if (!changed && r.max() <= opt.tolerance) {
      res.converged = true;
      break;
    }
    if (!changed) break;
    if (singular && std::none_of(next.begin(), next.end(), [](auto a) { return a; })) {
      Eigen::Index k;
      v.minCoeff(&k);
      next[k] = 1;
    }
    active = std::move(next);
  }

  Residuals r = residuals(v, w, scale);
  res.obstacle_residual = r.obstacle;
  res.dual_residual = r.dual;
  res.complementarity_residual = r.comp;
  res.contact_count = int(std::count(active.begin(), active.end(), 1));
  res.converged = res.converged || r.max() <= opt.tolerance;
  res.v = std::move(v);
  res.w = std::move(w);
  return res;
}

}  // namespace bkern
