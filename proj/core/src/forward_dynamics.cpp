#include "pardyn/forward_dynamics.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <utility>

#include "pardyn/scan.hpp"

namespace pardyn {

namespace {

void check_sizes(const RobotChain& chain, const JointVector& q,
                 const JointVector& qdot, const JointVector& tau) {
  const auto n = static_cast<Eigen::Index>(chain.size());
  if (n == 0) {
    throw std::invalid_argument("forward dynamics: chain has no links");
  }
  if (q.size() != n || qdot.size() != n || tau.size() != n) {
    throw std::invalid_argument(
        "forward dynamics: q, qdot and tau must each have one entry per "
        "joint (chain has " +
        std::to_string(n) + ")");
  }
}

// Torque surplus once the velocity-dependent and gravity terms are paid:
// the right-hand side every algorithm actually solves against.
JointVector torque_surplus(const ChainKinematics& kin,
                           std::span<const SpatialInertia> inertia,
                           const Vec3& gravity, const JointVector& qdot,
                           const JointVector& tau, ExecTrace* trace) {
  const JointVector zero = JointVector::Zero(qdot.size());
  return tau - inverse_dynamics_assembled(kin, inertia, gravity, qdot, zero,
                                          IdOptions{}, trace);
}

Eigen::MatrixXd joint_space_inertia_assembled(
    const ChainKinematics& kin, std::span<const SpatialInertia> inertia,
    ExecTrace* trace) {
  const auto n = static_cast<Eigen::Index>(kin.size());
  Eigen::MatrixXd m(n, n);
  if (trace != nullptr) {
    trace->note_parallel_stage();
  }
  const JointVector zero = JointVector::Zero(n);
  IdOptions opts;
  opts.apply_gravity = false;
#pragma omp parallel for schedule(static) if (n >= 4)
  for (Eigen::Index j = 0; j < n; ++j) {
    JointVector unit = JointVector::Zero(n);
    unit[j] = 1.0;
    // Only the first column carries the trace pointer so the probe stays
    // race-free under the parallel loop.
    m.col(j) = inverse_dynamics_assembled(kin, inertia, Vec3::Zero(), zero,
                                          unit, opts,
                                          j == 0 ? trace : nullptr);
  }
  return 0.5 * (m + m.transpose());
}

}  // namespace

Eigen::MatrixXd joint_space_inertia(const RobotChain& chain,
                                    const JointVector& q, ExecTrace* trace) {
  const auto n = static_cast<Eigen::Index>(chain.size());
  if (q.size() != n) {
    throw std::invalid_argument(
        "joint_space_inertia: q must have one entry per joint");
  }
  const ChainKinematics kin = assemble_kinematics(chain, q);
  const std::vector<SpatialInertia> inertia = link_inertias(chain);
  return joint_space_inertia_assembled(kin, inertia, trace);
}

JointVector jsiia_forward_dynamics(const RobotChain& chain,
                                   const JointVector& q,
                                   const JointVector& qdot,
                                   const JointVector& tau, ExecTrace* trace) {
  check_sizes(chain, q, qdot, tau);
  const ChainKinematics kin = assemble_kinematics(chain, q);
  const std::vector<SpatialInertia> inertia = link_inertias(chain);
  const JointVector surplus =
      torque_surplus(kin, inertia, chain.gravity, qdot, tau, trace);
  const Eigen::MatrixXd m = joint_space_inertia_assembled(kin, inertia, trace);

  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw DynamicsError(
        "joint-space inertia is not positive definite; the chain model is "
        "degenerate");
  }
  JointVector qddot = llt.solve(surplus);

  // The Cholesky solve is normally accurate to machine precision, but a
  // badly conditioned inertia can leave a visible residual. One step of
  // iterative refinement recovers it; if even that is not enough, the
  // result cannot be trusted.
  const double scale =
      std::max(surplus.norm(), std::numeric_limits<double>::min());
  JointVector residual = surplus - m * qddot;
  if (residual.norm() > 1e-9 * scale) {
    qddot += llt.solve(residual);
    residual = surplus - m * qddot;
    if (residual.norm() > 1e-9 * scale) {
      throw DynamicsError(
          "joint-space inertia solve failed to reach the required residual; "
          "the inertia matrix is too ill-conditioned");
    }
  }
  return qddot;
}

ArticulatedBodyInertias articulated_body_inertias(
    const ChainKinematics& kin, std::span<const SpatialInertia> inertia,
    ExecTrace* trace) {
  const auto n = static_cast<std::size_t>(kin.size());
  ArticulatedBodyInertias out;
  if (n == 0) {
    return out;
  }
  out.inertia.resize(n);
  out.joint_inertia.resize(static_cast<Eigen::Index>(n));
  out.gain.resize(n);

  // Tip-to-base: each link's articulated inertia feeds its parent's, so
  // this loop cannot be parallelized — it is the sequential backbone that
  // distinguishes this algorithm from the constraint-force one.
  out.inertia[n - 1] = inertia[n - 1].matrix();
  for (std::size_t i = n; i-- > 0;) {
    const Vec6 screw = kin.screw[i].stacked();
    const Vec6 inertia_screw = out.inertia[i] * screw;
    const double lambda = screw.dot(inertia_screw);
    if (!(lambda > 1e-14 * out.inertia[i].trace())) {
      throw DynamicsError("degenerate articulation at joint " +
                          std::to_string(i) +
                          ": projected articulated inertia vanishes");
    }
    out.joint_inertia[static_cast<Eigen::Index>(i)] = lambda;
    out.gain[i] = inertia_screw / lambda;
    if (i > 0) {
      // Apply the force-propagator projection, then carry the result
      // across the joint into the parent's frame.
      const Mat6 projected =
          out.inertia[i] -
          (inertia_screw * inertia_screw.transpose()) / lambda;
      const Mat6 carried = kin.transport[i - 1].mat.transpose() * projected *
                           kin.transport[i - 1].mat;
      const Mat6 assembled = inertia[i - 1].matrix() + carried;
      out.inertia[i - 1] = 0.5 * (assembled + assembled.transpose());
    }
  }
  if (trace != nullptr) {
    trace->note_sequential_chain(static_cast<int>(n));
  }
  return out;
}

JointVector abia_forward_dynamics(const RobotChain& chain,
                                  const JointVector& q,
                                  const JointVector& qdot,
                                  const JointVector& tau, ExecTrace* trace) {
  check_sizes(chain, q, qdot, tau);
  const auto n = static_cast<std::size_t>(chain.size());
  const ChainKinematics kin = assemble_kinematics(chain, q);
  const std::vector<SpatialInertia> inertia = link_inertias(chain);
  const JointVector surplus =
      torque_surplus(kin, inertia, chain.gravity, qdot, tau, trace);
  const ArticulatedBodyInertias ab =
      articulated_body_inertias(kin, inertia, trace);

  // Tip-to-base force sweep. z[i] is the articulated bias force of link i
  // once every descendant joint has yielded to its share of the torque
  // surplus; z vanishes at the tip and obeys a one-step recursion in the
  // parent direction, i.e. an upper bi-diagonal system.
  BlockBiDiagSystem<6> force_sys;
  force_sys.orientation = BiDiagOrientation::upper;
  force_sys.coupling.resize(n - 1);
  force_sys.rhs.resize(n, Vec6::Zero());
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const Vec6 next_screw = kin.screw[i + 1].stacked();
    const Mat6 yield =
        Mat6::Identity() - ab.gain[i + 1] * next_screw.transpose();
    force_sys.coupling[i] = kin.transport[i].mat.transpose() * yield;
    force_sys.rhs[i] = kin.transport[i].mat.transpose() *
                       (ab.gain[i + 1] *
                        surplus[static_cast<Eigen::Index>(i) + 1]);
  }
  ScanTrace force_scan;
  const std::vector<Vec6> z =
      solve_upper_bidiag(force_sys, trace != nullptr ? &force_scan : nullptr);

  // Base-to-tip acceleration sweep: a[i] depends on the parent's
  // acceleration through the complementary projection, a lower
  // bi-diagonal system.
  BlockBiDiagSystem<6> accel_sys;
  accel_sys.orientation = BiDiagOrientation::lower;
  accel_sys.coupling.resize(n - 1);
  accel_sys.rhs.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    const Vec6 screw = kin.screw[i].stacked();
    const double free_rate =
        (surplus[k] - screw.dot(z[i])) / ab.joint_inertia[k];
    accel_sys.rhs[i] = screw * free_rate;
    if (i > 0) {
      const Mat6 yield =
          Mat6::Identity() - screw * ab.gain[i].transpose();
      accel_sys.coupling[i - 1] = yield * kin.transport[i - 1].mat;
    }
  }
  ScanTrace accel_scan;
  const std::vector<Vec6> accel =
      solve_lower_bidiag(accel_sys, trace != nullptr ? &accel_scan : nullptr);

  // Per-joint extraction is independent once both sweeps are done.
  JointVector qddot(static_cast<Eigen::Index>(n));
  const auto nn = static_cast<Eigen::Index>(n);
#pragma omp parallel for schedule(static) if (nn >= 128)
  for (Eigen::Index k = 0; k < nn; ++k) {
    const auto i = static_cast<std::size_t>(k);
    const Vec6 screw = kin.screw[i].stacked();
    double value = (surplus[k] - screw.dot(z[i])) / ab.joint_inertia[k];
    if (i > 0) {
      const Vec6 parent_accel = kin.transport[i - 1].mat * accel[i - 1];
      value -= ab.gain[i].dot(parent_accel);
    }
    qddot[k] = value;
  }

  if (trace != nullptr) {
    trace->note_scan(force_scan);
    trace->note_scan(accel_scan);
    trace->note_parallel_stage();
  }
  return qddot;
}

ConstraintBasis build_constraint_basis(const RobotChain& chain) {
  const std::size_t n = chain.size();
  ConstraintBasis out;
  out.basis.resize(n);
  const auto nn = static_cast<Eigen::Index>(n);
#pragma omp parallel for schedule(static) if (nn >= 128)
  for (Eigen::Index k = 0; k < nn; ++k) {
    const Vec6 screw = chain.links[static_cast<std::size_t>(k)]
                           .joint_screw.stacked();
    Eigen::HouseholderQR<Eigen::Matrix<double, 6, 1>> qr(screw);
    const Mat6 full = qr.householderQ() * Mat6::Identity();
    out.basis[static_cast<std::size_t>(k)] = full.rightCols<5>();
  }
  return out;
}

CfaOperators build_cfa_operators(const RobotChain& chain,
                                 const ChainKinematics& kin,
                                 const ConstraintBasis& basis,
                                 ExecTrace* trace) {
  const auto n = static_cast<std::size_t>(chain.size());
  if (n == 0) {
    throw std::invalid_argument("build_cfa_operators: chain has no links");
  }
  if (basis.basis.size() != n || static_cast<std::size_t>(kin.size()) != n) {
    throw std::invalid_argument(
        "build_cfa_operators: kinematics and basis must match the chain");
  }
  const std::vector<SpatialInertia> inertia = link_inertias(chain);

  CfaOperators ops;
  ops.constraint_op.diag.resize(n);
  ops.constraint_op.upper.resize(n - 1);
  ops.cross_sub.resize(n - 1);
  ops.cross_diag.resize(n);
  ops.cross_super.resize(n - 1);
  ops.joint_diag.resize(static_cast<Eigen::Index>(n));
  ops.joint_off.resize(static_cast<Eigen::Index>(n) - 1);

  // Per-link solves against the link inertia. carried_* are the parent
  // link's subspace directions transported across the joint; solved_* are
  // the inertia solves of every direction this link is projected onto.
  // Each link reads only its own inertia and its successor's subspaces,
  // so the whole assembly is one parallel stage.
  std::vector<Eigen::Matrix<double, 6, 5>> solved_basis(n);
  std::vector<Vec6> solved_screw(n);
  std::vector<Eigen::Matrix<double, 6, 5>> carried_basis(n > 0 ? n - 1 : 0);
  std::vector<Vec6> carried_screw(n > 0 ? n - 1 : 0);
  std::vector<Eigen::Matrix<double, 6, 5>> solved_carried_basis(
      n > 0 ? n - 1 : 0);
  std::vector<Vec6> solved_carried_screw(n > 0 ? n - 1 : 0);

  const auto nn = static_cast<Eigen::Index>(n);
  bool llt_failed = false;
#pragma omp parallel for schedule(static) if (nn >= 16)
  for (Eigen::Index k = 0; k < nn; ++k) {
    const auto i = static_cast<std::size_t>(k);
    Eigen::LLT<Mat6> llt(inertia[i].matrix());
    if (llt.info() != Eigen::Success) {
      llt_failed = true;
      continue;
    }
    solved_basis[i] = llt.solve(basis.basis[i]);
    solved_screw[i] = llt.solve(kin.screw[i].stacked());
    if (i + 1 < n) {
      carried_basis[i] = kin.transport[i].mat.transpose() * basis.basis[i + 1];
      carried_screw[i] =
          kin.transport[i].mat.transpose() * kin.screw[i + 1].stacked();
      solved_carried_basis[i] = llt.solve(carried_basis[i]);
      solved_carried_screw[i] = llt.solve(carried_screw[i]);
    }
  }
  if (llt_failed) {
    throw DynamicsError(
        "constraint-force assembly: a link inertia is not positive definite");
  }
  if (trace != nullptr) {
    trace->note_parallel_stage();
  }

  // Project the solves onto the subspaces. Diagonal blocks gather the
  // link's own term plus the term its parent carried in; off-diagonal
  // blocks couple only neighbours. Again one parallel stage.
#pragma omp parallel for schedule(static) if (nn >= 16)
  for (Eigen::Index k = 0; k < nn; ++k) {
    const auto i = static_cast<std::size_t>(k);
    const Eigen::Matrix<double, 6, 5>& w = basis.basis[i];
    const Vec6 screw = kin.screw[i].stacked();

    Eigen::Matrix<double, 5, 5> a_diag = w.transpose() * solved_basis[i];
    Vec5 b_diag = w.transpose() * solved_screw[i];
    double c_diag = screw.dot(solved_screw[i]);
    if (i > 0) {
      a_diag += carried_basis[i - 1].transpose() * solved_carried_basis[i - 1];
      b_diag += carried_basis[i - 1].transpose() * solved_carried_screw[i - 1];
      c_diag += carried_screw[i - 1].dot(solved_carried_screw[i - 1]);
    }
    ops.constraint_op.diag[i] = 0.5 * (a_diag + a_diag.transpose());
    ops.cross_diag[i] = b_diag;
    ops.joint_diag[k] = c_diag;

    if (i + 1 < n) {
      ops.constraint_op.upper[i] = -(w.transpose() * solved_carried_basis[i]);
      ops.cross_super[i] = -(w.transpose() * solved_carried_screw[i]);
      ops.cross_sub[i] = -(carried_basis[i].transpose() * solved_screw[i]);
      ops.joint_off[k] = -screw.dot(solved_carried_screw[i]);
    }
  }
  if (trace != nullptr) {
    trace->note_parallel_stage();
  }
  return ops;
}

std::vector<Vec5> CfaOperators::apply_cross(const JointVector& v) const {
  const std::size_t n = cross_diag.size();
  std::vector<Vec5> out(n);
  const auto nn = static_cast<Eigen::Index>(n);
#pragma omp parallel for schedule(static) if (nn >= 128)
  for (Eigen::Index k = 0; k < nn; ++k) {
    const auto i = static_cast<std::size_t>(k);
    Vec5 value = cross_diag[i] * v[k];
    if (i > 0) {
      value += cross_sub[i - 1] * v[k - 1];
    }
    if (i + 1 < n) {
      value += cross_super[i] * v[k + 1];
    }
    out[i] = value;
  }
  return out;
}

JointVector CfaOperators::apply_cross_transpose(std::span<const Vec5> f) const {
  const std::size_t n = cross_diag.size();
  if (f.size() != n) {
    throw std::invalid_argument(
        "apply_cross_transpose: one constraint block per link expected");
  }
  JointVector out(static_cast<Eigen::Index>(n));
  const auto nn = static_cast<Eigen::Index>(n);
#pragma omp parallel for schedule(static) if (nn >= 128)
  for (Eigen::Index k = 0; k < nn; ++k) {
    const auto i = static_cast<std::size_t>(k);
    double value = cross_diag[i].dot(f[i]);
    if (i + 1 < n) {
      value += cross_sub[i].dot(f[i + 1]);
    }
    if (i > 0) {
      value += cross_super[i - 1].dot(f[i - 1]);
    }
    out[k] = value;
  }
  return out;
}

JointVector CfaOperators::apply_joint(const JointVector& v) const {
  const auto n = joint_diag.size();
  JointVector out(n);
#pragma omp parallel for schedule(static) if (n >= 128)
  for (Eigen::Index k = 0; k < n; ++k) {
    double value = joint_diag[k] * v[k];
    if (k > 0) {
      value += joint_off[k - 1] * v[k - 1];
    }
    if (k + 1 < n) {
      value += joint_off[k] * v[k + 1];
    }
    out[k] = value;
  }
  return out;
}

JointVector cfa_forward_dynamics(const RobotChain& chain, const JointVector& q,
                                 const JointVector& qdot,
                                 const JointVector& tau, ExecTrace* trace) {
  check_sizes(chain, q, qdot, tau);
  const ChainKinematics kin = assemble_kinematics(chain, q);
  const std::vector<SpatialInertia> inertia = link_inertias(chain);
  const JointVector surplus =
      torque_surplus(kin, inertia, chain.gravity, qdot, tau, trace);

  const ConstraintBasis basis = build_constraint_basis(chain);
  const CfaOperators ops = build_cfa_operators(chain, kin, basis, trace);

  // Constraint forces balance the part of the motion the joints cannot
  // absorb: solve the SPD block tri-diagonal system in the constraint
  // subspace, then read the accelerations back per joint.
  std::vector<Vec5> rhs = ops.apply_cross(surplus);
  for (Vec5& block : rhs) {
    block = -block;
  }
  OeeTrace oee_trace;
  const std::vector<Vec5> constraint_force = oee_solve<5, 1>(
      ops.constraint_op, rhs, trace != nullptr ? &oee_trace : nullptr);

  JointVector qddot =
      ops.apply_joint(surplus) + ops.apply_cross_transpose(constraint_force);

  if (trace != nullptr) {
    trace->note_oee(oee_trace);
    trace->note_parallel_stage();  // rhs assembly
    trace->note_parallel_stage();  // extraction
  }
  return qddot;
}

JointVector forward_dynamics(const RobotChain& chain, const JointVector& q,
                             const JointVector& qdot, const JointVector& tau,
                             FdAlgo algo, ExecTrace* trace) {
  switch (algo) {
    case FdAlgo::jsiia:
      return jsiia_forward_dynamics(chain, q, qdot, tau, trace);
    case FdAlgo::abia:
      return abia_forward_dynamics(chain, q, qdot, tau, trace);
    case FdAlgo::cfa:
      return cfa_forward_dynamics(chain, q, qdot, tau, trace);
  }
  throw std::invalid_argument("forward_dynamics: unknown algorithm");
}

std::vector<FdResult> batch_forward_dynamics(std::span<const FdProblem> problems,
                                             FdAlgo algo) {
  std::vector<FdResult> out(problems.size());
  const auto n = static_cast<Eigen::Index>(problems.size());
#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index k = 0; k < n; ++k) {
    const FdProblem& p = problems[static_cast<std::size_t>(k)];
    FdResult& r = out[static_cast<std::size_t>(k)];
    try {
      r.qddot = forward_dynamics(p.chain, p.q, p.qdot, p.tau, algo);
    } catch (const std::exception& e) {
      r.error = e.what();
    }
  }
  return out;
}

}  // namespace pardyn
