#include <benchmark/benchmark.h>

#include "bkern/bergman.hpp"
#include "bkern/obstacle.hpp"
#include "bkern/sections.hpp"

using namespace bkern;

namespace {

Execution mode(const benchmark::State& st) { return st.range(0) ? Execution::Parallel : Execution::Serial; }

const SampledBasis& sampled() {
  static const SampledBasis s = [] {
    auto surface = SurfaceModel::projective_line(2.0);
    return sample_basis(SectionBasis::build(surface, 16, Twist::Plain), build_quadrature(surface, 256));
  }();
  return s;
}

void BM_SampleBasis(benchmark::State& st) {
  auto surface = SurfaceModel::projective_line(2.0);
  auto basis = SectionBasis::build(surface, 16, Twist::Plain);
  auto q = build_quadrature(surface, 256);
  for (auto _ : st) benchmark::DoNotOptimize(sample_basis(basis, q, mode(st)));
}

void BM_Gram(benchmark::State& st) {
  const auto& s = sampled();
  for (auto _ : st) benchmark::DoNotOptimize(gram_matrix(s, mode(st)));
}

void BM_KernelValues(benchmark::State& st) {
  auto surface = SurfaceModel::projective_line(2.0);
  KernelEvaluator k(SectionBasis::build(surface, 16, Twist::Plain), build_quadrature(surface, 128));
  auto nodes = sample_nodes(surface, 96);
  for (auto _ : st) benchmark::DoNotOptimize(k.values(nodes, mode(st)));
}

LcpProblem laplacian_problem(int n) {
  LcpProblem p;
  const int N = n * n;
  std::vector<Eigen::Triplet<double>> t;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      int k = j * n + i;
      t.emplace_back(k, k, 4.0);
      t.emplace_back(k, j * n + (i + 1) % n, -1.0);
      t.emplace_back(k, j * n + (i + n - 1) % n, -1.0);
      t.emplace_back(k, ((j + 1) % n) * n + i, -1.0);
      t.emplace_back(k, ((j + n - 1) % n) * n + i, -1.0);
    }
  p.M.resize(N, N);
  p.M.setFromTriplets(t.begin(), t.end());
  p.q = Eigen::VectorXd::Constant(N, -1.0);
  p.q[0] = double(N);
  p.color.resize(N);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) p.color[j * n + i] = std::uint8_t((i + j) % 2);
  return p;
}

void BM_PsorSweep(benchmark::State& st) {
  auto p = laplacian_problem(512);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(p.q.size());
  for (auto _ : st) {
    psor_sweep(p, v, 1.8, mode(st));
    benchmark::ClobberMemory();
  }
}

}  // namespace

BENCHMARK(BM_SampleBasis)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Gram)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KernelValues)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PsorSweep)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
