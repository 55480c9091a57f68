// Acceptance suite: one criterion per function, one [PASS]/[FAIL] line per
// criterion, nonzero exit status if anything fails. Each check measures the
// library against an independent route — sequential recursions, dense
// factorizations, closed-form mechanics — with pinned tolerances.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <pardyn/bench.hpp>
#include <pardyn/forward_dynamics.hpp>
#include <pardyn/inverse_dynamics.hpp>
#include <pardyn/model.hpp>
#include <pardyn/oee.hpp>
#include <pardyn/scan.hpp>

#include "support/oracles.hpp"

using namespace pardyn;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;  // failure reason, or an informational note on pass
};

Outcome pass(const std::string& note = "") { return {true, note}; }
Outcome fail(const std::string& why) { return {false, why}; }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

int current_worker_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_worker_count(int n) {
#ifdef _OPENMP
  omp_set_num_threads(n);
#else
  (void)n;
#endif
}

// --------------------------------------------------------------------------
// 1. Solver primitives against sequential and dense oracles.

template <int D>
BlockBiDiagSystem<D> random_bidiag(int n, BiDiagOrientation orientation,
                                   oracle::TestRng& rng) {
  // Mild contraction keeps long products bounded so the relative comparison
  // is meaningful at every chain position.
  const double scale = 0.4 / std::sqrt(static_cast<double>(D));
  BlockBiDiagSystem<D> sys;
  sys.orientation = orientation;
  sys.coupling.resize(n > 0 ? n - 1 : 0);
  sys.rhs.resize(n);
  for (int k = 0; k + 1 < n; ++k) {
    sys.coupling[k] = scale * rng.template matrix<D, D>();
  }
  for (int k = 0; k < n; ++k) {
    sys.rhs[k] = rng.template matrix<D, 1>();
  }
  return sys;
}

template <int D>
std::string check_bidiag_sizes(oracle::TestRng& rng) {
  for (int n = 1; n <= 64; ++n) {
    for (BiDiagOrientation orientation :
         {BiDiagOrientation::lower, BiDiagOrientation::upper}) {
      const BlockBiDiagSystem<D> sys = random_bidiag<D>(n, orientation, rng);
      ScanTrace trace;
      const auto got = orientation == BiDiagOrientation::lower
                           ? solve_lower_bidiag(sys, &trace)
                           : solve_upper_bidiag(sys, &trace);
      const auto want = oracle::recurrence_solve(sys);
      const double gap = oracle::rel_gap_blocks<D>(got, want);
      if (!(gap <= 1e-12)) {
        return "bi-diagonal solve, block size " + std::to_string(D) + ", n=" +
               std::to_string(n) + ": relative gap " + fmt(gap);
      }
      if (trace.rounds != ceil_log2(static_cast<std::size_t>(n))) {
        return "bi-diagonal solve, n=" + std::to_string(n) +
               ": unexpected round count " + std::to_string(trace.rounds);
      }
    }
  }
  return "";
}

template <int B>
std::string check_tridiag_sizes(oracle::TestRng& rng) {
  for (int n = 1; n <= 128; ++n) {
    const SymBlockTriDiagSystem<B> sys = oracle::random_tridiag<B>(n, rng);
    std::vector<Eigen::Matrix<double, B, 1>> rhs(n);
    for (int k = 0; k < n; ++k) rhs[k] = rng.template matrix<B, 1>();

    OeeTrace trace;
    const auto got = oee_solve<B, 1>(sys, rhs, &trace);
    const auto thomas = block_thomas_solve<B, 1>(sys, rhs);
    const auto dense = oracle::dense_tridiag_solve<B, 1>(sys, rhs);

    const double gap_thomas = oracle::rel_gap_blocks<B>(got, thomas);
    const double gap_dense = oracle::rel_gap_blocks<B>(got, dense);
    if (!(gap_thomas <= 1e-9 && gap_dense <= 1e-9)) {
      return "tri-diagonal solve, block size " + std::to_string(B) + ", n=" +
             std::to_string(n) + ": gaps " + fmt(gap_thomas) + " / " +
             fmt(gap_dense);
    }
    if (trace.rounds != ceil_log2(static_cast<std::size_t>(n))) {
      return "tri-diagonal solve, n=" + std::to_string(n) +
             ": unexpected round count " + std::to_string(trace.rounds);
    }
  }
  return "";
}

Outcome criterion_solver_oracles() {
  oracle::TestRng rng(1001);
  for (const std::string& err :
       {check_bidiag_sizes<1>(rng), check_bidiag_sizes<2>(rng),
        check_bidiag_sizes<6>(rng)}) {
    if (!err.empty()) return fail(err);
  }
  for (const std::string& err :
       {check_tridiag_sizes<1>(rng), check_tridiag_sizes<2>(rng),
        check_tridiag_sizes<5>(rng)}) {
    if (!err.empty()) return fail(err);
  }
  return pass();
}

// --------------------------------------------------------------------------
// 2. Cross-algorithm agreement of the forward-dynamics routes.

Outcome criterion_algorithms_agree() {
  double worst = 0.0;
  for (int n : {1, 2, 5, 10, 50, 200}) {
    // 100 states per size, split over two mechanisms.
    std::vector<FdProblem> problems;
    problems.reserve(100);
    for (int c = 0; c < 2; ++c) {
      const RobotChain chain =
          random_chain(n, 9100 + 10 * static_cast<std::uint64_t>(n) +
                              static_cast<std::uint64_t>(c));
      oracle::TestRng rng(40 + static_cast<std::uint64_t>(n) * 2 +
                          static_cast<std::uint64_t>(c));
      for (int state = 0; state < 50; ++state) {
        FdProblem p;
        p.chain = chain;
        p.q = rng.vector(n, -3.0, 3.0);
        p.qdot = rng.vector(n, -2.0, 2.0);
        p.tau = rng.vector(n, -10.0, 10.0);
        problems.push_back(std::move(p));
      }
    }

    const auto dense = batch_forward_dynamics(problems, FdAlgo::jsiia);
    const auto articulated = batch_forward_dynamics(problems, FdAlgo::abia);
    const auto constraint = batch_forward_dynamics(problems, FdAlgo::cfa);

    for (std::size_t i = 0; i < problems.size(); ++i) {
      if (!dense[i].ok() || !articulated[i].ok() || !constraint[i].ok()) {
        return fail("n=" + std::to_string(n) + ", state " + std::to_string(i) +
                    ": an algorithm reported an error");
      }
      const double gap_ab =
          oracle::rel_gap(articulated[i].qddot, dense[i].qddot);
      const double gap_cf =
          oracle::rel_gap(constraint[i].qddot, dense[i].qddot);
      worst = std::max({worst, gap_ab, gap_cf});
      if (!(gap_ab <= 1e-8 && gap_cf <= 1e-8)) {
        return fail("n=" + std::to_string(n) + ", state " + std::to_string(i) +
                    ": relative gaps " + fmt(gap_ab) + " / " + fmt(gap_cf));
      }
    }
  }
  return pass("worst relative gap " + fmt(worst));
}

// --------------------------------------------------------------------------
// 3. Closed-form mechanisms.

Outcome criterion_closed_form() {
  const oracle::Pendulum pend;
  const RobotChain pend_chain = pend.chain();
  oracle::TestRng rng(333);
  for (int state = 0; state < 100; ++state) {
    JointVector q(1), qdot(1), qddot(1), tau(1);
    q[0] = rng.uniform(-6.0, 6.0);
    qdot[0] = rng.uniform(-4.0, 4.0);
    qddot[0] = rng.uniform(-10.0, 10.0);
    tau[0] = rng.uniform(-8.0, 8.0);

    const JointVector got_tau = inverse_dynamics(pend_chain, q, qdot, qddot);
    const double want_tau = pend.torque(q[0], qdot[0], qddot[0]);
    if (!(std::abs(got_tau[0] - want_tau) <=
          1e-8 * std::max(1.0, std::abs(want_tau)))) {
      return fail("pendulum torque, state " + std::to_string(state));
    }
    const double want_acc = pend.accel(q[0], qdot[0], tau[0]);
    for (FdAlgo algo : {FdAlgo::jsiia, FdAlgo::abia, FdAlgo::cfa}) {
      const JointVector got = forward_dynamics(pend_chain, q, qdot, tau, algo);
      if (!(std::abs(got[0] - want_acc) <=
            1e-8 * std::max(1.0, std::abs(want_acc)))) {
        return fail("pendulum acceleration, state " + std::to_string(state));
      }
    }
  }

  const oracle::PlanarArm arm;
  const RobotChain arm_chain = arm.chain();
  for (int state = 0; state < 100; ++state) {
    const Eigen::Vector2d q = rng.vector(2, -6.0, 6.0);
    const Eigen::Vector2d qdot = rng.vector(2, -4.0, 4.0);
    const Eigen::Vector2d qddot = rng.vector(2, -10.0, 10.0);
    const Eigen::Vector2d tau = rng.vector(2, -8.0, 8.0);

    const JointVector got_tau = inverse_dynamics(arm_chain, q, qdot, qddot);
    if (!(oracle::rel_gap(got_tau, arm.torque(q, qdot, qddot)) <= 1e-8)) {
      return fail("two-link torque, state " + std::to_string(state));
    }
    const Eigen::Vector2d want_acc = arm.accel(q, qdot, tau);
    for (FdAlgo algo : {FdAlgo::jsiia, FdAlgo::abia, FdAlgo::cfa}) {
      const JointVector got = forward_dynamics(arm_chain, q, qdot, tau, algo);
      if (!(oracle::rel_gap(got, want_acc) <= 1e-8)) {
        return fail("two-link acceleration, state " + std::to_string(state));
      }
    }
  }
  return pass();
}

// --------------------------------------------------------------------------
// 4. Forward and inverse dynamics as mutual inverses.

Outcome criterion_roundtrips() {
  const RobotChain chain = random_chain(20, 777);
  oracle::TestRng rng(778);
  double worst = 0.0;
  for (int state = 0; state < 20; ++state) {
    const JointVector q = rng.vector(20, -3.0, 3.0);
    const JointVector qdot = rng.vector(20, -2.0, 2.0);
    const JointVector qddot = rng.vector(20, -10.0, 10.0);
    const JointVector tau = rng.vector(20, -10.0, 10.0);

    const JointVector tau_of_qddot = inverse_dynamics(chain, q, qdot, qddot);
    for (FdAlgo algo : {FdAlgo::jsiia, FdAlgo::abia, FdAlgo::cfa}) {
      // torque -> acceleration -> torque
      const JointVector acc = forward_dynamics(chain, q, qdot, tau, algo);
      const double gap_tau =
          oracle::rel_gap(inverse_dynamics(chain, q, qdot, acc), tau);
      // acceleration -> torque -> acceleration
      const JointVector back =
          forward_dynamics(chain, q, qdot, tau_of_qddot, algo);
      const double gap_acc = oracle::rel_gap(back, qddot);
      worst = std::max({worst, gap_tau, gap_acc});
      if (!(gap_tau <= 1e-8 && gap_acc <= 1e-8)) {
        return fail("state " + std::to_string(state) + ": round-trip gaps " +
                    fmt(gap_tau) + " / " + fmt(gap_acc));
      }
    }
  }
  return pass("worst relative gap " + fmt(worst));
}

// --------------------------------------------------------------------------
// 5. Structural identities of the assembled operators.

Outcome criterion_operator_identities() {
  // Joint-space inertia, assembled column by column with no symmetrization:
  // the two triangles must already agree, and the matrix must be SPD.
  for (int n : {5, 20, 64}) {
    const RobotChain chain =
        random_chain(n, 2400 + static_cast<std::uint64_t>(n));
    oracle::TestRng rng(2500 + static_cast<std::uint64_t>(n));
    const JointVector q = rng.vector(n, -3.0, 3.0);
    const ChainKinematics kin = assemble_kinematics(chain, q);
    const auto inertia = link_inertias(chain);

    Eigen::MatrixXd m(n, n);
    IdOptions opts;
    opts.apply_gravity = false;
    const JointVector zero = JointVector::Zero(n);
    for (int j = 0; j < n; ++j) {
      JointVector unit = JointVector::Zero(n);
      unit[j] = 1.0;
      m.col(j) = inverse_dynamics_assembled(kin, inertia, Vec3::Zero(), zero,
                                            unit, opts);
    }
    const double asym = (m - m.transpose()).norm() / std::max(1.0, m.norm());
    if (!(asym <= 1e-10)) {
      return fail("inertia asymmetry " + fmt(asym) + " at n=" +
                  std::to_string(n));
    }
    if (Eigen::LLT<Eigen::MatrixXd>(m).info() != Eigen::Success) {
      return fail("inertia not positive definite at n=" + std::to_string(n));
    }
  }

  // Eliminating the constraint forces must invert the joint-space inertia.
  for (int n : {2, 4, 8, 16}) {
    const RobotChain chain =
        random_chain(n, 2600 + static_cast<std::uint64_t>(n));
    oracle::TestRng rng(2700 + static_cast<std::uint64_t>(n));
    const JointVector q = rng.vector(n, -3.0, 3.0);
    const ChainKinematics kin = assemble_kinematics(chain, q);
    const CfaOperators ops =
        build_cfa_operators(chain, kin, build_constraint_basis(chain));

    const Eigen::MatrixXd a = oracle::dense_constraint_op(ops);
    const Eigen::MatrixXd b = oracle::dense_cross_op(ops);
    const Eigen::MatrixXd c = oracle::dense_joint_op(ops);
    const Eigen::MatrixXd m = joint_space_inertia(chain, q);
    const double gap =
        (  (c - b.transpose() * a.llt().solve(b)) * m -
           Eigen::MatrixXd::Identity(n, n))
            .norm();
    if (!(gap <= 1e-7)) {
      return fail("constraint-elimination inverse off by " + fmt(gap) +
                  " at n=" + std::to_string(n));
    }
  }

  // The elimination must keep every diagonal block symmetric round by round
  // and finish with no couplings left after exactly ceil_log2(n) rounds.
  oracle::TestRng rng(2800);
  for (int n : {5, 16, 33, 100}) {
    const SymBlockTriDiagSystem<5> sys = oracle::random_tridiag<5>(n, rng);
    std::vector<Vec5> rhs(n);
    for (int k = 0; k < n; ++k) rhs[k] = rng.matrix<5, 1>();

    OeeState<5, 1> state{sys.diag, sys.upper, rhs, 1, 0};
    const int rounds = ceil_log2(static_cast<std::size_t>(n));
    for (int j = 0; j < rounds; ++j) {
      oee_eliminate_round(state);
      for (const auto& d : state.diag) {
        const double asym =
            (d - d.transpose()).norm() / std::max(1.0, d.norm());
        if (!(asym <= 1e-10)) {
          return fail("eliminated diagonal asymmetry " + fmt(asym) +
                      " in round " + std::to_string(state.round));
        }
      }
    }
    if (!state.coupling.empty() || state.round != rounds) {
      return fail("elimination did not terminate as scheduled at n=" +
                  std::to_string(n));
    }
  }
  return pass();
}

// --------------------------------------------------------------------------
// 6. Dependency counters.

Outcome criterion_structure_counters() {
  oracle::TestRng rng(3100);
  for (int n : {1, 2, 3, 5, 8, 33, 100, 256}) {
    const BlockBiDiagSystem<1> sys =
        random_bidiag<1>(n, BiDiagOrientation::lower, rng);
    ScanTrace trace;
    solve_lower_bidiag(sys, &trace);
    if (trace.rounds != ceil_log2(static_cast<std::size_t>(n))) {
      return fail("scan depth " + std::to_string(trace.rounds) + " at n=" +
                  std::to_string(n));
    }
  }

  for (int n : {1, 17, 64}) {
    const RobotChain chain =
        random_chain(n, 3200 + static_cast<std::uint64_t>(n));
    oracle::TestRng state_rng(3300 + static_cast<std::uint64_t>(n));
    const JointVector q = state_rng.vector(n, -3.0, 3.0);
    const JointVector qdot = state_rng.vector(n, -2.0, 2.0);
    const JointVector tau = state_rng.vector(n, -8.0, 8.0);

    ExecTrace articulated;
    abia_forward_dynamics(chain, q, qdot, tau, &articulated);
    if (articulated.longest_sequential_link_chain != n) {
      return fail("articulated-inertia route reports chain walk of " +
                  std::to_string(articulated.longest_sequential_link_chain) +
                  " at n=" + std::to_string(n));
    }

    ExecTrace constraint;
    cfa_forward_dynamics(chain, q, qdot, tau, &constraint);
    if (constraint.longest_sequential_link_chain != 0) {
      return fail("constraint route reports chain walk of " +
                  std::to_string(constraint.longest_sequential_link_chain) +
                  " at n=" + std::to_string(n));
    }
    if (constraint.oee_rounds != ceil_log2(static_cast<std::size_t>(n)) ||
        constraint.scan_rounds_max != ceil_log2(static_cast<std::size_t>(n))) {
      return fail("constraint route depth counters off at n=" +
                  std::to_string(n));
    }
  }
  return pass();
}

// --------------------------------------------------------------------------
// 7. Measured scaling.

double fitted_slope(const std::vector<BenchRecord>& records, BenchAlgo algo,
                    int min_links) {
  std::vector<double> xs, ys;
  for (const BenchRecord& r : records) {
    if (r.algo == algo && r.n_links >= min_links) {
      xs.push_back(std::log(static_cast<double>(r.n_links)));
      ys.push_back(std::log(r.mean_us));
    }
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    num += (xs[i] - mx) * (ys[i] - my);
    den += (xs[i] - mx) * (xs[i] - mx);
  }
  return num / den;
}

Outcome criterion_scaling() {
  const int previous_workers = current_worker_count();

  BenchConfig config;
  config.mode = BenchMode::link_sweep;
  config.algos = {BenchAlgo::jsiia, BenchAlgo::cfa};
  config.link_counts = {8, 16, 32, 64, 128, 256};
  config.repeats = 15;
  config.seed = 42;
  config.worker_count = 1;  // isolate algorithmic cost from parallel speedup

  const auto dir = std::filesystem::temp_directory_path() / "pardyn_acceptance";
  std::filesystem::create_directories(dir);
  const std::string csv = (dir / "link_sweep.csv").string();

  const BenchReport report = run_benchmark(config);
  set_worker_count(previous_workers);
  if (!report.all_ok()) {
    return fail("benchmark cell failed: " + report.failures.front().message);
  }
  emit_csv(report.records, csv);
  const std::vector<BenchRecord> records = parse_csv(csv);
  if (records.size() != 12) {
    return fail("expected 12 records, parsed " +
                std::to_string(records.size()));
  }

  // Fit above the small-n noise floor, where per-call overhead no longer
  // masks the asymptotic term.
  const double slope_dense = fitted_slope(records, BenchAlgo::jsiia, 32);
  const double slope_constraint = fitted_slope(records, BenchAlgo::cfa, 32);
  if (!(slope_dense >= 2.0)) {
    return fail("dense-inertia route scales with exponent " +
                fmt(slope_dense) + ", expected at least 2");
  }
  if (!(slope_constraint < slope_dense)) {
    return fail("constraint route exponent " + fmt(slope_constraint) +
                " does not undercut the dense route's " + fmt(slope_dense));
  }
  return pass("exponents: dense " + fmt(slope_dense) + ", constraint " +
              fmt(slope_constraint));
}

// --------------------------------------------------------------------------
// 8. Bit-identical results for any worker count.

struct DeterminismProbe {
  JointVector id_torque;
  JointVector fd[3];
  std::vector<Vec6> scan;
  std::vector<Vec5> elimination;
  std::vector<RobotChain> chains;
  WorkloadInputs inputs;
};

DeterminismProbe run_probe() {
  DeterminismProbe probe;

  const RobotChain chain = random_chain(64, 4242);
  oracle::TestRng rng(4243);
  const JointVector q = rng.vector(64, -3.0, 3.0);
  const JointVector qdot = rng.vector(64, -2.0, 2.0);
  const JointVector qddot = rng.vector(64, -10.0, 10.0);
  const JointVector tau = rng.vector(64, -10.0, 10.0);

  probe.id_torque = inverse_dynamics(chain, q, qdot, qddot);
  probe.fd[0] = forward_dynamics(chain, q, qdot, tau, FdAlgo::jsiia);
  probe.fd[1] = forward_dynamics(chain, q, qdot, tau, FdAlgo::abia);
  probe.fd[2] = forward_dynamics(chain, q, qdot, tau, FdAlgo::cfa);

  oracle::TestRng sys_rng(4244);
  probe.scan = solve_lower_bidiag(
      random_bidiag<6>(300, BiDiagOrientation::lower, sys_rng));

  const SymBlockTriDiagSystem<5> sys = oracle::random_tridiag<5>(100, sys_rng);
  std::vector<Vec5> rhs(100);
  for (int k = 0; k < 100; ++k) rhs[k] = sys_rng.matrix<5, 1>();
  probe.elimination = oee_solve<5, 1>(sys, rhs);

  const std::uint64_t cell = workload_seed(42, 16, 8);
  probe.chains = workload_chains(cell, 16, 8);
  probe.inputs = workload_inputs(cell, 16, 8, 3);
  return probe;
}

std::string diff_probe(const DeterminismProbe& a, const DeterminismProbe& b) {
  if ((a.id_torque - b.id_torque).norm() != 0.0) return "inverse dynamics";
  const char* names[3] = {"dense-inertia forward dynamics",
                          "articulated-inertia forward dynamics",
                          "constraint forward dynamics"};
  for (int k = 0; k < 3; ++k) {
    if ((a.fd[k] - b.fd[k]).norm() != 0.0) return names[k];
  }
  for (std::size_t i = 0; i < a.scan.size(); ++i) {
    if ((a.scan[i] - b.scan[i]).norm() != 0.0) return "prefix-scan solve";
  }
  for (std::size_t i = 0; i < a.elimination.size(); ++i) {
    if ((a.elimination[i] - b.elimination[i]).norm() != 0.0) {
      return "odd-even elimination";
    }
  }
  for (std::size_t i = 0; i < a.chains.size(); ++i) {
    if (!(a.chains[i] == b.chains[i])) return "workload chains";
  }
  for (std::size_t i = 0; i < a.inputs.q.size(); ++i) {
    if ((a.inputs.q[i] - b.inputs.q[i]).norm() != 0.0 ||
        (a.inputs.qdot[i] - b.inputs.qdot[i]).norm() != 0.0 ||
        (a.inputs.drive[i] - b.inputs.drive[i]).norm() != 0.0) {
      return "workload inputs";
    }
  }
  return "";
}

Outcome criterion_determinism() {
  const int previous_workers = current_worker_count();

  set_worker_count(1);
  const DeterminismProbe reference = run_probe();
  for (int workers : {4, 8}) {
    set_worker_count(workers);
    const DeterminismProbe probe = run_probe();
    const std::string diff = diff_probe(reference, probe);
    if (!diff.empty()) {
      set_worker_count(previous_workers);
      return fail(diff + " differs between 1 and " + std::to_string(workers) +
                  " workers");
    }
  }
  set_worker_count(previous_workers);
  return pass();
}

}  // namespace

int main() {
  using CriterionFn = std::function<Outcome()>;
  const std::vector<std::pair<std::string, CriterionFn>> criteria = {
      {"solver primitives match sequential and dense oracles",
       criterion_solver_oracles},
      {"forward-dynamics algorithms agree on random chains",
       criterion_algorithms_agree},
      {"closed-form pendulum and two-link dynamics reproduced",
       criterion_closed_form},
      {"forward and inverse dynamics invert each other",
       criterion_roundtrips},
      {"operator symmetry and inversion identities hold",
       criterion_operator_identities},
      {"dependency counters match the designed structure",
       criterion_structure_counters},
      {"measured scaling separates the algorithm families",
       criterion_scaling},
      {"results bit-identical across 1, 4 and 8 workers",
       criterion_determinism},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome = fail(std::string("unexpected exception: ") + e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();

    std::string line = outcome.ok ? "[PASS]" : "[FAIL]";
    line += " criterion " + std::to_string(i + 1) + ": " + criteria[i].first;
    if (!outcome.ok) {
      line += " — " + outcome.detail;
    } else if (!outcome.detail.empty()) {
      line += " (" + outcome.detail + ")";
    }
    line += " [" + fmt(seconds) + " s]";
    std::puts(line.c_str());
    if (!outcome.ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
