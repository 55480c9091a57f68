#include "pardyn/inverse_dynamics.hpp"

#include <stdexcept>
#include <string>

namespace pardyn {

namespace {

void check_joint_size(const ChainKinematics& kin, const JointVector& v,
                      const char* name) {
  if (v.size() != kin.size()) {
    throw std::invalid_argument(std::string(name) + " has length " +
                                std::to_string(v.size()) + " but the chain has " +
                                std::to_string(kin.size()) + " joints");
  }
}

std::vector<Twist> to_twists(const std::vector<Vec6>& v) {
  std::vector<Twist> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = Twist::from_stacked(v[i]);
  return out;
}

}  // namespace

std::vector<Twist> propagate_velocities(const ChainKinematics& kin,
                                        const JointVector& qdot,
                                        const Twist& base_velocity,
                                        ScanTrace* trace) {
  check_joint_size(kin, qdot, "qdot");
  const int n = kin.size();
  if (n == 0) {
    if (trace) trace->rounds = 0;
    return {};
  }

  BlockBiDiagSystem<6> sys;
  sys.orientation = BiDiagOrientation::lower;
  sys.coupling.resize(n - 1);
  sys.rhs.resize(n);

#pragma omp parallel for schedule(static) if (n >= 128)
  for (int i = 0; i < n; ++i) {
    sys.rhs[i] = qdot[i] * kin.screw[i].stacked();
    if (i >= 1) sys.coupling[i - 1] = kin.transport[i - 1].mat;
  }
  sys.rhs[0] += kin.base_transport.mat * base_velocity.stacked();

  return to_twists(solve_lower_bidiag(sys, trace));
}

std::vector<Twist> propagate_accelerations(const ChainKinematics& kin,
                                           std::span<const Twist> velocity,
                                           const JointVector& qdot,
                                           const JointVector& qddot,
                                           const Twist& base_acceleration,
                                           ScanTrace* trace) {
  check_joint_size(kin, qdot, "qdot");
  check_joint_size(kin, qddot, "qddot");
  const int n = kin.size();
  if (n == 0) {
    if (trace) trace->rounds = 0;
    return {};
  }

  BlockBiDiagSystem<6> sys;
  sys.orientation = BiDiagOrientation::lower;
  sys.coupling.resize(n - 1);
  sys.rhs.resize(n);

#pragma omp parallel for schedule(static) if (n >= 128)
  for (int i = 0; i < n; ++i) {
    // Differentiating V[i] = transport * V[i-1] + screw * qdot[i] moves the
    // transport's rate into a velocity-product term on the link's own twist.
    const Vec6 joint_rate = qdot[i] * kin.screw[i].stacked();
    sys.rhs[i] = qddot[i] * kin.screw[i].stacked() +
                 small_adjoint(velocity[i]) * joint_rate;
    if (i >= 1) sys.coupling[i - 1] = kin.transport[i - 1].mat;
  }
  sys.rhs[0] += kin.base_transport.mat * base_acceleration.stacked();

  return to_twists(solve_lower_bidiag(sys, trace));
}

std::vector<Wrench> propagate_forces(const ChainKinematics& kin,
                                     std::span<const Twist> velocity,
                                     std::span<const Twist> acceleration,
                                     std::span<const SpatialInertia> inertia,
                                     const Wrench& tip_wrench,
                                     ScanTrace* trace) {
  const int n = kin.size();
  if (n == 0) {
    if (trace) trace->rounds = 0;
    return {};
  }

  BlockBiDiagSystem<6> sys;
  sys.orientation = BiDiagOrientation::upper;
  sys.coupling.resize(n - 1);
  sys.rhs.resize(n);

#pragma omp parallel for schedule(static) if (n >= 128)
  for (int i = 0; i < n; ++i) {
    // Single-body balance: F = J*a - ad_V^T (J*V), plus the transported
    // child force. The minus sign on the velocity-product term belongs to
    // the (angular, linear) stacking used throughout; it is pinned by the
    // analytic-arm tests.
    const Vec6 momentum = inertia[i].matrix() * velocity[i].stacked();
    sys.rhs[i] = inertia[i].matrix() * acceleration[i].stacked() -
                 small_adjoint(velocity[i]).transpose() * momentum;
    if (i + 1 < n) sys.coupling[i] = kin.transport[i].mat.transpose();
  }
  sys.rhs[n - 1] += tip_wrench.stacked();

  const std::vector<Vec6> f = solve_upper_bidiag(sys, trace);
  std::vector<Wrench> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = Wrench::from_stacked(f[i]);
  return out;
}

JointVector inverse_dynamics_assembled(const ChainKinematics& kin,
                                       std::span<const SpatialInertia> inertia,
                                       const Vec3& gravity,
                                       const JointVector& qdot,
                                       const JointVector& qddot,
                                       const IdOptions& opts,
                                       ExecTrace* trace) {
  const int n = kin.size();

  ScanTrace scan_vel, scan_acc, scan_frc;
  const std::vector<Twist> vel =
      propagate_velocities(kin, qdot, opts.base_velocity, &scan_vel);

  Twist base_acc = opts.base_acceleration;
  if (opts.apply_gravity) {
    // Accelerating the base against gravity is equivalent to gravity acting
    // on every link.
    base_acc.linear -= gravity;
  }
  const std::vector<Twist> acc =
      propagate_accelerations(kin, vel, qdot, qddot, base_acc, &scan_acc);
  const std::vector<Wrench> frc =
      propagate_forces(kin, vel, acc, inertia, opts.tip_wrench, &scan_frc);

  JointVector tau(n);
#pragma omp parallel for schedule(static) if (n >= 128)
  for (int i = 0; i < n; ++i) {
    tau[i] = kin.screw[i].stacked().dot(frc[i].stacked());
  }

  if (trace) {
    trace->note_scan(scan_vel);
    trace->note_scan(scan_acc);
    trace->note_scan(scan_frc);
    // Kinematics assembly, three source builds, torque extraction.
    trace->note_parallel_stage();
    trace->note_parallel_stage();
    trace->note_parallel_stage();
    trace->note_parallel_stage();
    trace->note_parallel_stage();
  }
  return tau;
}

JointVector inverse_dynamics(const RobotChain& chain, const JointVector& q,
                             const JointVector& qdot, const JointVector& qddot,
                             const IdOptions& opts, ExecTrace* trace) {
  const ChainKinematics kin = assemble_kinematics(chain, q);
  const std::vector<SpatialInertia> inertia = link_inertias(chain);
  return inverse_dynamics_assembled(kin, inertia, chain.gravity, qdot, qddot,
                                    opts, trace);
}

JointVector bias_torque(const RobotChain& chain, const JointVector& q,
                        const JointVector& qdot, ExecTrace* trace) {
  return inverse_dynamics(chain, q, qdot, JointVector::Zero(chain.size()), {},
                          trace);
}

LinkStates link_states(const RobotChain& chain, const JointVector& q,
                       const JointVector& qdot, const JointVector& qddot,
                       const IdOptions& opts) {
  const ChainKinematics kin = assemble_kinematics(chain, q);
  const std::vector<SpatialInertia> inertia = link_inertias(chain);

  LinkStates states;
  states.velocity = propagate_velocities(kin, qdot, opts.base_velocity);
  Twist base_acc = opts.base_acceleration;
  if (opts.apply_gravity) base_acc.linear -= chain.gravity;
  states.acceleration =
      propagate_accelerations(kin, states.velocity, qdot, qddot, base_acc);
  states.force = propagate_forces(kin, states.velocity, states.acceleration,
                                  inertia, opts.tip_wrench);
  return states;
}

}  // namespace pardyn
