#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pardyn/model.hpp"
#include "pardyn/types.hpp"

// Benchmark harness: repeat-averaged timings of the dynamics algorithms over
// two sweeps — single-call cost vs chain length, and batch cost vs group
// count. Workloads are fully seeded: the same (seed, n_links, n_groups)
// always produces the bitwise-same chains and joint inputs, independent of
// the worker count, so timing runs are comparable and correctness
// spot-checks can pair algorithms on identical inputs.

namespace pardyn {

enum class BenchMode { link_sweep, group_sweep };

enum class BenchAlgo { jsiia, abia, cfa, invdyn };

std::string to_string(BenchAlgo algo);

// Accepts exactly the names printed by to_string; throws
// std::invalid_argument listing the valid names otherwise.
BenchAlgo bench_algo_from_string(const std::string& name);

struct BenchConfig {
  BenchMode mode = BenchMode::link_sweep;
  std::vector<BenchAlgo> algos = {BenchAlgo::jsiia, BenchAlgo::abia,
                                  BenchAlgo::cfa};
  std::vector<int> link_counts = {10, 50, 100, 200};
  std::vector<int> group_counts = {1, 10, 100, 1000};  // group sweep only
  int repeats = 1000;
  std::uint64_t seed = 42;
  int worker_count = 0;  // 0: leave the runtime default untouched
  bool spot_check = true;
  std::string output_path = "results.csv";
};

// Throws std::invalid_argument on empty sweeps, repeats < 1, nonpositive
// counts, or a negative worker count.
void validate(const BenchConfig& config);

struct BenchRecord {
  BenchAlgo algo = BenchAlgo::jsiia;
  int n_links = 0;
  int n_groups = 1;
  int repeats = 0;
  int worker_count = 0;
  double mean_us = 0.0;
  double stddev_us = 0.0;
};

struct BenchCellFailure {
  BenchAlgo algo = BenchAlgo::jsiia;
  int n_links = 0;
  int n_groups = 1;
  std::string message;
};

struct BenchReport {
  std::vector<BenchRecord> records;
  std::vector<BenchCellFailure> failures;

  bool all_ok() const { return failures.empty(); }
};

// Runs every (algo, n_links[, n_groups]) cell of the configured sweep:
// three discarded warm-up calls, then `repeats` timed calls on fresh seeded
// inputs, reporting mean and sample standard deviation in microseconds.
// Input generation and spot-checks happen strictly outside the timed
// regions. A failing cell is recorded and skipped; the others proceed.
BenchReport run_benchmark(const BenchConfig& config);

// Header `algo,n_links,n_groups,repeats,worker_count,mean_us,stddev_us`,
// one row per record, ASCII, every line newline-terminated. Doubles carry
// enough digits that parsing the file back recovers them exactly.
void emit_csv(const std::vector<BenchRecord>& records, const std::string& path);

std::vector<BenchRecord> parse_csv(const std::string& path);

// Workload construction, exposed for verification: every chain and joint
// input of a benchmark cell derives from workload_seed(seed, n_links,
// n_groups) — deliberately independent of the algorithm, so different
// algorithms in the same cell see identical problems.
std::uint64_t workload_seed(std::uint64_t seed, int n_links, int n_groups);

std::vector<RobotChain> workload_chains(std::uint64_t cell_seed, int n_links,
                                        int n_groups);

// One repeat's joint inputs for every group member, uniform in [-1, 1].
// `drive` is the torque for the forward-dynamics algorithms and the target
// acceleration for inverse dynamics.
struct WorkloadInputs {
  std::vector<JointVector> q;
  std::vector<JointVector> qdot;
  std::vector<JointVector> drive;
};

WorkloadInputs workload_inputs(std::uint64_t cell_seed, int n_links,
                               int n_groups, int repeat);

}  // namespace pardyn
