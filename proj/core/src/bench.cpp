#include "pardyn/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "pardyn/forward_dynamics.hpp"
#include "pardyn/inverse_dynamics.hpp"

namespace pardyn {

namespace {

constexpr const char* kCsvHeader =
    "algo,n_links,n_groups,repeats,worker_count,mean_us,stddev_us";

// Calls discarded before timing starts: first-touch allocation, cache and
// branch-predictor warmth.
constexpr int kWarmups = 3;

// Timed repeats between correctness spot-checks (~1%).
constexpr int kSpotStride = 100;

// Cross-algorithm agreement tolerance for spot-checks. Deliberately looser
// than the library's own accuracy tests: random benchmark chains can be
// poorly conditioned, and a spot-check failure should mean a genuine
// disagreement, not conditioning noise.
constexpr double kSpotTol = 1e-6;

// splitmix64 finalizer: decorrelates structured inputs (small integers,
// related seeds) into independent-looking streams.
std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform doubles in [-1, 1] from a fixed 64-bit engine. The mapping is
// spelled out (top 53 bits to [0,1)) rather than delegated to
// std::uniform_real_distribution, whose output is not pinned across
// standard library implementations.
class InputRng {
 public:
  explicit InputRng(std::uint64_t seed) : eng_(seed) {}

  double symmetric() {
    const double unit = static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    return 2.0 * unit - 1.0;
  }

  JointVector vector(int n) {
    JointVector v(n);
    for (int i = 0; i < n; ++i) v[i] = symmetric();
    return v;
  }

 private:
  std::mt19937_64 eng_;
};

double relative_gap(const JointVector& a, const JointVector& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

FdAlgo to_fd_algo(BenchAlgo algo) {
  switch (algo) {
    case BenchAlgo::jsiia:
      return FdAlgo::jsiia;
    case BenchAlgo::abia:
      return FdAlgo::abia;
    case BenchAlgo::cfa:
      return FdAlgo::cfa;
    case BenchAlgo::invdyn:
      break;
  }
  throw std::logic_error("to_fd_algo: not a forward-dynamics algorithm");
}

// Re-evaluates one problem with an independent route and compares. For the
// forward-dynamics algorithms the reference is a different forward
// algorithm on the same inputs; for inverse dynamics the torque is fed back
// through forward dynamics and must reproduce the commanded acceleration.
void spot_check_forward(BenchAlgo algo, const RobotChain& chain,
                        const JointVector& q, const JointVector& qdot,
                        const JointVector& tau, const JointVector& qddot) {
  const FdAlgo reference =
      algo == BenchAlgo::jsiia ? FdAlgo::abia : FdAlgo::jsiia;
  const JointVector expected = forward_dynamics(chain, q, qdot, tau, reference);
  const double gap = relative_gap(qddot, expected);
  if (!(gap <= kSpotTol)) {
    throw DynamicsError("spot check: " + to_string(algo) +
                        " disagrees with reference forward dynamics "
                        "(relative gap " +
                        std::to_string(gap) + ")");
  }
}

void spot_check_inverse(const RobotChain& chain, const JointVector& q,
                        const JointVector& qdot, const JointVector& qddot,
                        const JointVector& tau) {
  const JointVector recovered =
      forward_dynamics(chain, q, qdot, tau, FdAlgo::jsiia);
  const double gap = relative_gap(recovered, qddot);
  if (!(gap <= kSpotTol)) {
    throw DynamicsError(
        "spot check: inverse dynamics round trip failed to recover the "
        "commanded acceleration (relative gap " +
        std::to_string(gap) + ")");
  }
}

struct CellStats {
  double mean_us = 0.0;
  double stddev_us = 0.0;
};

CellStats summarize(const std::vector<double>& samples) {
  CellStats s;
  if (samples.empty()) return s;
  double sum = 0.0;
  for (double v : samples) sum += v;
  s.mean_us = sum / static_cast<double>(samples.size());
  if (samples.size() > 1) {
    double sq = 0.0;
    for (double v : samples) {
      const double d = v - s.mean_us;
      sq += d * d;
    }
    s.stddev_us = std::sqrt(sq / static_cast<double>(samples.size() - 1));
  }
  return s;
}

using Clock = std::chrono::steady_clock;

double elapsed_us(Clock::time_point t0, Clock::time_point t1) {
  return std::chrono::duration<double, std::micro>(t1 - t0).count();
}

// Times `repeats` single calls on one chain, fresh inputs per call.
CellStats run_single_cell(BenchAlgo algo, std::uint64_t cell_seed, int n_links,
                          int repeats, bool spot_check) {
  const std::vector<RobotChain> chains = workload_chains(cell_seed, n_links, 1);
  const RobotChain& chain = chains.front();

  std::vector<double> samples;
  samples.reserve(static_cast<std::size_t>(repeats));

  for (int call = 0; call < repeats + kWarmups; ++call) {
    const WorkloadInputs in = workload_inputs(cell_seed, n_links, 1, call);
    const JointVector& q = in.q.front();
    const JointVector& qdot = in.qdot.front();
    const JointVector& drive = in.drive.front();

    JointVector result;
    if (algo == BenchAlgo::invdyn) {
      const auto t0 = Clock::now();
      result = inverse_dynamics(chain, q, qdot, drive);
      const auto t1 = Clock::now();
      if (call >= kWarmups) samples.push_back(elapsed_us(t0, t1));
    } else {
      const FdAlgo fd = to_fd_algo(algo);
      const auto t0 = Clock::now();
      result = forward_dynamics(chain, q, qdot, drive, fd);
      const auto t1 = Clock::now();
      if (call >= kWarmups) samples.push_back(elapsed_us(t0, t1));
    }

    const int timed_index = call - kWarmups;
    if (spot_check && timed_index >= 0 && timed_index % kSpotStride == 0) {
      if (algo == BenchAlgo::invdyn) {
        spot_check_inverse(chain, q, qdot, drive, result);
      } else {
        spot_check_forward(algo, chain, q, qdot, drive, result);
      }
    }
  }
  return summarize(samples);
}

// Times `repeats` whole-group evaluations: one batch call (or one parallel
// sweep, for inverse dynamics) per repeat across n_groups independent
// chains.
CellStats run_group_cell(BenchAlgo algo, std::uint64_t cell_seed, int n_links,
                         int n_groups, int repeats, bool spot_check) {
  const std::vector<RobotChain> chains =
      workload_chains(cell_seed, n_links, n_groups);

  // Problems persist across repeats; only the joint vectors are refreshed,
  // so the untimed bookkeeping never copies chain models.
  std::vector<FdProblem> problems;
  if (algo != BenchAlgo::invdyn) {
    problems.resize(static_cast<std::size_t>(n_groups));
    for (int m = 0; m < n_groups; ++m) {
      problems[static_cast<std::size_t>(m)].chain =
          chains[static_cast<std::size_t>(m)];
    }
  }

  std::vector<double> samples;
  samples.reserve(static_cast<std::size_t>(repeats));

  for (int call = 0; call < repeats + kWarmups; ++call) {
    const WorkloadInputs in =
        workload_inputs(cell_seed, n_links, n_groups, call);

    JointVector first_result;
    if (algo == BenchAlgo::invdyn) {
      std::vector<JointVector> torques(static_cast<std::size_t>(n_groups));
      std::vector<std::string> errors(static_cast<std::size_t>(n_groups));
      const auto t0 = Clock::now();
#pragma omp parallel for schedule(dynamic)
      for (int m = 0; m < n_groups; ++m) {
        const auto s = static_cast<std::size_t>(m);
        try {
          torques[s] = inverse_dynamics(chains[s], in.q[s], in.qdot[s],
                                        in.drive[s]);
        } catch (const std::exception& e) {
          errors[s] = e.what();
        }
      }
      const auto t1 = Clock::now();
      for (int m = 0; m < n_groups; ++m) {
        const auto s = static_cast<std::size_t>(m);
        if (!errors[s].empty()) {
          throw DynamicsError("group member " + std::to_string(m) + ": " +
                              errors[s]);
        }
      }
      if (call >= kWarmups) samples.push_back(elapsed_us(t0, t1));
      first_result = torques.front();
    } else {
      for (int m = 0; m < n_groups; ++m) {
        const auto s = static_cast<std::size_t>(m);
        problems[s].q = in.q[s];
        problems[s].qdot = in.qdot[s];
        problems[s].tau = in.drive[s];
      }
      const FdAlgo fd = to_fd_algo(algo);
      const auto t0 = Clock::now();
      const std::vector<FdResult> results = batch_forward_dynamics(problems, fd);
      const auto t1 = Clock::now();
      for (int m = 0; m < n_groups; ++m) {
        const auto s = static_cast<std::size_t>(m);
        if (!results[s].ok()) {
          throw DynamicsError("group member " + std::to_string(m) + ": " +
                              results[s].error);
        }
      }
      if (call >= kWarmups) samples.push_back(elapsed_us(t0, t1));
      first_result = results.front().qddot;
    }

    const int timed_index = call - kWarmups;
    if (spot_check && timed_index >= 0 && timed_index % kSpotStride == 0) {
      const RobotChain& chain = chains.front();
      if (algo == BenchAlgo::invdyn) {
        spot_check_inverse(chain, in.q.front(), in.qdot.front(),
                           in.drive.front(), first_result);
      } else {
        spot_check_forward(algo, chain, in.q.front(), in.qdot.front(),
                           in.drive.front(), first_result);
      }
    }
  }
  return summarize(samples);
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

[[noreturn]] void csv_error(const std::string& path, std::size_t line,
                            const std::string& what) {
  throw std::runtime_error("benchmark csv '" + path + "' line " +
                           std::to_string(line) + ": " + what);
}

}  // namespace

std::string to_string(BenchAlgo algo) {
  switch (algo) {
    case BenchAlgo::jsiia:
      return "jsiia";
    case BenchAlgo::abia:
      return "abia";
    case BenchAlgo::cfa:
      return "cfa";
    case BenchAlgo::invdyn:
      return "invdyn";
  }
  return "unknown";
}

BenchAlgo bench_algo_from_string(const std::string& name) {
  if (name == "jsiia") return BenchAlgo::jsiia;
  if (name == "abia") return BenchAlgo::abia;
  if (name == "cfa") return BenchAlgo::cfa;
  if (name == "invdyn") return BenchAlgo::invdyn;
  throw std::invalid_argument("unknown benchmark algorithm '" + name +
                              "' (expected jsiia, abia, cfa or invdyn)");
}

void validate(const BenchConfig& config) {
  if (config.algos.empty()) {
    throw std::invalid_argument("benchmark config: no algorithms selected");
  }
  if (config.link_counts.empty()) {
    throw std::invalid_argument("benchmark config: link sweep is empty");
  }
  for (int n : config.link_counts) {
    if (n < 1) {
      throw std::invalid_argument(
          "benchmark config: link counts must be at least 1");
    }
  }
  if (config.mode == BenchMode::group_sweep) {
    if (config.group_counts.empty()) {
      throw std::invalid_argument("benchmark config: group sweep is empty");
    }
    for (int g : config.group_counts) {
      if (g < 1) {
        throw std::invalid_argument(
            "benchmark config: group counts must be at least 1");
      }
    }
  }
  if (config.repeats < 1) {
    throw std::invalid_argument("benchmark config: repeats must be at least 1");
  }
  if (config.worker_count < 0) {
    throw std::invalid_argument(
        "benchmark config: worker count cannot be negative");
  }
}

std::uint64_t workload_seed(std::uint64_t seed, int n_links, int n_groups) {
  std::uint64_t h = mix(seed);
  h = mix(h ^ static_cast<std::uint64_t>(n_links));
  h = mix(h ^ (static_cast<std::uint64_t>(n_groups) << 20));
  return h;
}

std::vector<RobotChain> workload_chains(std::uint64_t cell_seed, int n_links,
                                        int n_groups) {
  std::vector<RobotChain> chains;
  chains.reserve(static_cast<std::size_t>(n_groups));
  for (int g = 0; g < n_groups; ++g) {
    chains.push_back(
        random_chain(n_links, mix(cell_seed ^ (0xC0FFEEULL + static_cast<std::uint64_t>(g)))));
  }
  return chains;
}

WorkloadInputs workload_inputs(std::uint64_t cell_seed, int n_links,
                               int n_groups, int repeat) {
  InputRng rng(mix(cell_seed ^
                   (0x5EEDULL + static_cast<std::uint64_t>(repeat) *
                                    0x9e3779b97f4a7c15ULL)));
  WorkloadInputs in;
  in.q.reserve(static_cast<std::size_t>(n_groups));
  in.qdot.reserve(static_cast<std::size_t>(n_groups));
  in.drive.reserve(static_cast<std::size_t>(n_groups));
  for (int g = 0; g < n_groups; ++g) {
    in.q.push_back(rng.vector(n_links));
    in.qdot.push_back(rng.vector(n_links));
    in.drive.push_back(rng.vector(n_links));
  }
  return in;
}

BenchReport run_benchmark(const BenchConfig& config) {
  validate(config);

#ifdef _OPENMP
  if (config.worker_count > 0) {
    omp_set_num_threads(config.worker_count);
  }
  const int effective_workers =
      config.worker_count > 0 ? config.worker_count : omp_get_max_threads();
#else
  const int effective_workers =
      config.worker_count > 0 ? config.worker_count : 1;
#endif

  const std::vector<int> group_counts =
      config.mode == BenchMode::group_sweep ? config.group_counts
                                            : std::vector<int>{1};

  BenchReport report;
  for (BenchAlgo algo : config.algos) {
    for (int n : config.link_counts) {
      for (int g : group_counts) {
        const std::uint64_t cell_seed = workload_seed(config.seed, n, g);
        try {
          const CellStats stats =
              config.mode == BenchMode::link_sweep
                  ? run_single_cell(algo, cell_seed, n, config.repeats,
                                    config.spot_check)
                  : run_group_cell(algo, cell_seed, n, g, config.repeats,
                                   config.spot_check);
          BenchRecord rec;
          rec.algo = algo;
          rec.n_links = n;
          rec.n_groups = g;
          rec.repeats = config.repeats;
          rec.worker_count = effective_workers;
          rec.mean_us = stats.mean_us;
          rec.stddev_us = stats.stddev_us;
          report.records.push_back(rec);
        } catch (const std::exception& e) {
          report.failures.push_back(BenchCellFailure{algo, n, g, e.what()});
        }
      }
    }
  }
  return report;
}

void emit_csv(const std::vector<BenchRecord>& records,
              const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open benchmark csv '" + path +
                             "' for writing");
  }
  out << kCsvHeader << '\n';
  for (const BenchRecord& r : records) {
    out << to_string(r.algo) << ',' << r.n_links << ',' << r.n_groups << ','
        << r.repeats << ',' << r.worker_count << ','
        << format_double(r.mean_us) << ',' << format_double(r.stddev_us)
        << '\n';
  }
  if (!out) {
    throw std::runtime_error("failed writing benchmark csv '" + path + "'");
  }
}

std::vector<BenchRecord> parse_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open benchmark csv '" + path + "'");
  }

  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) {
    csv_error(path, line_no, "empty file");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) {
    csv_error(path, line_no, "unexpected header '" + line + "'");
  }

  std::vector<BenchRecord> records;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 7) {
      csv_error(path, line_no,
                "expected 7 fields, got " + std::to_string(fields.size()));
    }

    BenchRecord r;
    try {
      r.algo = bench_algo_from_string(fields[0]);
      r.n_links = std::stoi(fields[1]);
      r.n_groups = std::stoi(fields[2]);
      r.repeats = std::stoi(fields[3]);
      r.worker_count = std::stoi(fields[4]);
      r.mean_us = std::stod(fields[5]);
      r.stddev_us = std::stod(fields[6]);
    } catch (const std::exception& e) {
      csv_error(path, line_no, e.what());
    }
    records.push_back(r);
  }
  return records;
}

}  // namespace pardyn
