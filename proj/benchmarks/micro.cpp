// google-benchmark microbenchmarks for the solver primitives and the full
// dynamics routines. Chain length is the benchmark range argument; inputs
// come from the same seeded workload generators the CLI harness uses.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <random>
#include <vector>

#include <pardyn/bench.hpp>
#include <pardyn/forward_dynamics.hpp>
#include <pardyn/inverse_dynamics.hpp>
#include <pardyn/oee.hpp>
#include <pardyn/scan.hpp>

namespace {

constexpr std::uint64_t kSeed = 42;

struct Fixture {
  pardyn::RobotChain chain;
  pardyn::JointVector q, qdot, qddot, tau;
};

Fixture make_fixture(int n) {
  const std::uint64_t cell = pardyn::workload_seed(kSeed, n, 1);
  Fixture f;
  f.chain = pardyn::workload_chains(cell, n, 1).front();
  const pardyn::WorkloadInputs in = pardyn::workload_inputs(cell, n, 1, 0);
  f.q = in.q.front();
  f.qdot = in.qdot.front();
  f.qddot = in.drive.front();
  f.tau = in.drive.front();
  return f;
}

// Raw solver inputs, independent of any mechanism.
pardyn::BlockBiDiagSystem<6> make_bidiag(int n) {
  std::mt19937_64 eng(kSeed + static_cast<std::uint64_t>(n));
  auto draw = [&eng] {
    return 0.3 * (2.0 * (static_cast<double>(eng() >> 11) * 0x1.0p-53) - 1.0);
  };
  pardyn::BlockBiDiagSystem<6> sys;
  sys.coupling.resize(n - 1);
  sys.rhs.resize(n);
  for (auto& c : sys.coupling)
    for (int r = 0; r < 6; ++r)
      for (int k = 0; k < 6; ++k) c(r, k) = draw();
  for (auto& b : sys.rhs)
    for (int r = 0; r < 6; ++r) b[r] = draw();
  return sys;
}

struct TriDiag {
  pardyn::SymBlockTriDiagSystem<5> sys;
  std::vector<pardyn::Vec5> rhs;
};

TriDiag make_tridiag(int n) {
  std::mt19937_64 eng(kSeed + 1000 + static_cast<std::uint64_t>(n));
  auto draw = [&eng] {
    return 2.0 * (static_cast<double>(eng() >> 11) * 0x1.0p-53) - 1.0;
  };
  TriDiag t;
  t.sys.diag.resize(n);
  t.sys.upper.resize(n - 1);
  t.rhs.resize(n);
  for (auto& u : t.sys.upper)
    for (int r = 0; r < 5; ++r)
      for (int k = 0; k < 5; ++k) u(r, k) = draw();
  for (int i = 0; i < n; ++i) {
    Eigen::Matrix<double, 5, 5> a;
    for (int r = 0; r < 5; ++r)
      for (int k = 0; k < 5; ++k) a(r, k) = draw();
    double dominance = 1.0;
    if (i > 0) dominance += t.sys.upper[i - 1].norm();
    if (i + 1 < n) dominance += t.sys.upper[i].norm();
    t.sys.diag[i] = a * a.transpose() +
                    dominance * Eigen::Matrix<double, 5, 5>::Identity();
    for (int r = 0; r < 5; ++r) t.rhs[i][r] = draw();
  }
  return t;
}

void BM_ScanBidiagSolve(benchmark::State& state) {
  const auto sys = make_bidiag(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(pardyn::solve_lower_bidiag(sys));
  }
}
BENCHMARK(BM_ScanBidiagSolve)->RangeMultiplier(2)->Range(8, 256);

void BM_OddEvenElimination(benchmark::State& state) {
  const auto t = make_tridiag(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(pardyn::oee_solve<5, 1>(t.sys, t.rhs));
  }
}
BENCHMARK(BM_OddEvenElimination)->RangeMultiplier(2)->Range(8, 256);

void BM_InverseDynamics(benchmark::State& state) {
  const Fixture f = make_fixture(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        pardyn::inverse_dynamics(f.chain, f.q, f.qdot, f.qddot));
  }
}
BENCHMARK(BM_InverseDynamics)->RangeMultiplier(2)->Range(8, 256);

void BM_ForwardDense(benchmark::State& state) {
  const Fixture f = make_fixture(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(pardyn::jsiia_forward_dynamics(
        f.chain, f.q, f.qdot, f.tau));
  }
}
BENCHMARK(BM_ForwardDense)->RangeMultiplier(2)->Range(8, 256);

void BM_ForwardArticulated(benchmark::State& state) {
  const Fixture f = make_fixture(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(pardyn::abia_forward_dynamics(
        f.chain, f.q, f.qdot, f.tau));
  }
}
BENCHMARK(BM_ForwardArticulated)->RangeMultiplier(2)->Range(8, 256);

void BM_ForwardConstraint(benchmark::State& state) {
  const Fixture f = make_fixture(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(pardyn::cfa_forward_dynamics(
        f.chain, f.q, f.qdot, f.tau));
  }
}
BENCHMARK(BM_ForwardConstraint)->RangeMultiplier(2)->Range(8, 256);

}  // namespace

BENCHMARK_MAIN();
