#include <benchmark/benchmark.h>

#include <random>

#include "hybriddg/dg.hpp"
#include "hybriddg/mesh.hpp"
#include "hybriddg/stability.hpp"
#include "hybriddg/timeint.hpp"

using namespace hdg;

namespace {

Eigen::VectorXd random_state(Eigen::Index n) {
  std::mt19937 rng(1);
  std::normal_distribution<double> g;
  Eigen::VectorXd U(n);
  for (Eigen::Index i = 0; i < n; ++i) U(i) = g(rng);
  return U;
}

// One full right-hand side on a uniform mesh of a single element type.
// Arguments: element type, degree, 0 = GL / 1 = SEM.
void BM_Rhs(benchmark::State& state) {
  const auto type = static_cast<ElemType>(state.range(0));
  const int N = static_cast<int>(state.range(1));
  const HybridMesh mesh = uniform_mesh(type, 4);
  const Discretization d(mesh, N, state.range(2) ? Formulation::sem() : Formulation::gl());
  const Eigen::VectorXd U = random_state(d.num_dofs());
  Eigen::VectorXd dU(d.num_dofs());
  for (auto _ : state) {
    d.rhs(U, dU);
    benchmark::DoNotOptimize(dU.data());
  }
  state.SetLabel(to_string(type));
  state.counters["dofs/s"] =
      benchmark::Counter(static_cast<double>(d.num_dofs()), benchmark::Counter::kIsIterationInvariantRate);
}

void BM_RhsHybrid(benchmark::State& state) {
  const HybridMesh mesh = hybrid_mesh(4);
  const Discretization d(mesh, static_cast<int>(state.range(0)), Formulation::gl());
  const Eigen::VectorXd U = random_state(d.num_dofs());
  Eigen::VectorXd dU(d.num_dofs());
  for (auto _ : state) {
    d.rhs(U, dU);
    benchmark::DoNotOptimize(dU.data());
  }
  state.counters["dofs/s"] =
      benchmark::Counter(static_cast<double>(d.num_dofs()), benchmark::Counter::kIsIterationInvariantRate);
}

void BM_Ab3Step(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  Eigen::VectorXd u = random_state(n), f0 = random_state(n), f1 = f0, f2 = f0;
  for (auto _ : state) {
    ab3_step(u, 1e-3, f0, f1, f2);
    benchmark::DoNotOptimize(u.data());
  }
}

// Constants are cached per (type, N); this times the lookup used when local
// timesteps are planned, after one warm-up sweep over N = 1..9.
void BM_TraceConstant(benchmark::State& state) {
  const auto type = static_cast<ElemType>(state.range(0));
  for (int N = 1; N <= 9; ++N) computed_trace_constant(type, N);
  int N = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(analytic_trace_constant(type, N));
    benchmark::DoNotOptimize(computed_trace_constant(type, N));
    N = N % 9 + 1;
  }
  state.SetLabel(to_string(type));
}

void BM_LocalTimesteps(benchmark::State& state) {
  const HybridMesh mesh = hybrid_mesh(4);
  const Discretization d(mesh, 3, Formulation::gl());
  for (auto _ : state) benchmark::DoNotOptimize(local_timesteps(d, 0.5));
}

}  // namespace

BENCHMARK(BM_Rhs)->ArgsProduct({{0, 1, 2, 3}, {1, 2, 3, 4}, {0, 1}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_RhsHybrid)->DenseRange(1, 4)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Ab3Step)->Range(1 << 10, 1 << 20);
BENCHMARK(BM_TraceConstant)->DenseRange(0, 3);
BENCHMARK(BM_LocalTimesteps)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
