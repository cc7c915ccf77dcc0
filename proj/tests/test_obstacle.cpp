#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include <Eigen/Dense>

#include "bkern/obstacle.hpp"

using namespace bkern;

namespace {

// path (or cycle) Laplacian plus a diagonal shift
LcpProblem chain_problem(int n, double shift, bool cycle, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0), wgt(0.5, 2.0);
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd diag = Eigen::VectorXd::Constant(n, shift);
  int edges = cycle ? n : n - 1;
  for (int e = 0; e < edges; ++e) {
    int a = e, b = (e + 1) % n;
    double w = wgt(rng);
    trip.push_back({a, b, -w});
    trip.push_back({b, a, -w});
    diag[a] += w;
    diag[b] += w;
  }
  for (int i = 0; i < n; ++i) trip.push_back({i, i, diag[i]});
  LcpProblem p;
  p.M.resize(n, n);
  p.M.setFromTriplets(trip.begin(), trip.end());
  p.q.resize(n);
  for (int i = 0; i < n; ++i) p.q[i] = u(rng);
  p.color.resize(n);
  for (int i = 0; i < n; ++i) p.color[i] = std::uint8_t(i % 2);
  return p;
}

LcpProblem grid_problem(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  std::vector<Eigen::Triplet<double>> trip;
  auto id = [n](int i, int j) { return ((j + n) % n) * n + (i + n) % n; };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      trip.push_back({id(i, j), id(i, j), 4.0});
      for (auto [di, dj] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) trip.push_back({id(i, j), id(i + di, j + dj), -1.0});
    }
  LcpProblem p;
  p.M.resize(n * n, n * n);
  p.M.setFromTriplets(trip.begin(), trip.end());
  p.q.resize(n * n);
  for (int k = 0; k < n * n; ++k) p.q[k] = nd(rng) + 0.3;
  p.color.resize(n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) p.color[id(i, j)] = std::uint8_t((i + j) % 2);
  return p;
}

// enumerate free sets: v_F = -M_FF^{-1} q_F, v = 0 elsewhere
std::vector<Eigen::VectorXd> brute_force(const LcpProblem& p) {
  int n = int(p.q.size());
  Eigen::MatrixXd M(p.M);
  std::vector<Eigen::VectorXd> sols;
  for (int mask = 0; mask < (1 << n); ++mask) {
    std::vector<int> F;
    for (int i = 0; i < n; ++i)
      if (mask >> i & 1) F.push_back(i);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    if (!F.empty()) {
      Eigen::MatrixXd A(F.size(), F.size());
      Eigen::VectorXd b(F.size());
      for (std::size_t a = 0; a < F.size(); ++a) {
        b[a] = -p.q[F[a]];
        for (std::size_t c = 0; c < F.size(); ++c) A(a, c) = M(F[a], F[c]);
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
      if (!lu.isInvertible()) continue;
      Eigen::VectorXd x = lu.solve(b);
      for (std::size_t a = 0; a < F.size(); ++a) v[F[a]] = x[a];
    }
    Eigen::VectorXd w = M * v + p.q;
    if (v.minCoeff() >= -1e-12 && w.minCoeff() >= -1e-12) sols.push_back(v);
  }
  return sols;
}

}  // namespace

TEST_CASE("small LCPs match active-set enumeration") {
  for (unsigned seed = 1; seed <= 30; ++seed) {
    bool cycle = seed % 2 == 0;
    int n = cycle ? 4 + 2 * int(seed % 4) : 3 + int(seed % 8);  // cycles must stay two-colourable
    auto p = chain_problem(n, 0.1 + 0.05 * (seed % 3), cycle, seed);
    auto sols = brute_force(p);
    REQUIRE(sols.size() == 1);
    auto r = solve_lcp(p);
    CHECK(r.converged);
    CHECK((r.v - sols[0]).lpNorm<Eigen::Infinity>() < 1e-8);
    CHECK(r.complementarity_residual < 1e-8);
  }
}

TEST_CASE("solution satisfies the complementarity system") {
  auto p = grid_problem(32, 7);
  p.M += Eigen::SparseMatrix<double, Eigen::RowMajor>(
      Eigen::VectorXd::Constant(32 * 32, 1e-2).asDiagonal());
  auto r = solve_lcp(p);
  REQUIRE(r.converged);
  Eigen::VectorXd w = p.M * r.v + p.q;
  CHECK((w - r.w).lpNorm<Eigen::Infinity>() < 1e-9);
  CHECK(r.v.minCoeff() >= -1e-8);
  CHECK(r.w.minCoeff() >= -1e-8 * p.q.cwiseAbs().maxCoeff());
  CHECK(r.v.cwiseMin(r.w).cwiseAbs().maxCoeff() < 1e-8 * p.q.cwiseAbs().maxCoeff());
  CHECK(r.contact_count > 0);
  CHECK(!r.history.empty());
}

TEST_CASE("singular periodic Laplacian forces a contact") {
  auto p = grid_problem(24, 11);
  auto r = solve_lcp(p);
  REQUIRE(r.converged);
  CHECK(r.contact_count >= 1);
  CHECK(r.v.minCoeff() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.complementarity_residual < 1e-8);
  CHECK(r.dual_residual < 1e-8);
}

TEST_CASE("warm start reaches the same solution") {
  auto p = chain_problem(10, 0.2, false, 42);
  auto cold = solve_lcp(p);
  Eigen::VectorXd guess = cold.v + Eigen::VectorXd::Constant(10, 0.01);
  auto warm = solve_lcp(p, {}, &guess);
  CHECK((warm.v - cold.v).lpNorm<Eigen::Infinity>() < 1e-9);
}

TEST_CASE("serial and parallel sweeps give identical iterates") {
  auto p = grid_problem(40, 5);
  Eigen::VectorXd a = Eigen::VectorXd::Zero(1600), b = a;
  for (int s = 0; s < 10; ++s) {
    psor_sweep(p, a, 1.7, Execution::Serial);
    psor_sweep(p, b, 1.7, Execution::Parallel);
  }
  CHECK((a - b).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(a.minCoeff() >= 0.0);
}
