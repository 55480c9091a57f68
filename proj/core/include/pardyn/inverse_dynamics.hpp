#pragma once

#include <span>
#include <vector>

#include "pardyn/model.hpp"
#include "pardyn/scan.hpp"
#include "pardyn/trace.hpp"

// Inverse dynamics of a serial chain: given the joint motion, compute the
// joint torques. The three chain recursions (velocities and accelerations
// toward the tip, forces toward the base) are block bi-diagonal systems and
// are solved with the logarithmic-depth scan solvers; only the per-link
// source terms are computed pointwise.

namespace pardyn {

// Optional boundary terms. Gravity is realized as a fictitious base
// acceleration of -gravity, which injects the correct gravitational load
// into every link without a separate force term. `tip_wrench` is an
// additional wrench entering the last link's force balance, expressed in
// the last link's frame (a payload or contact force at the tool).
struct IdOptions {
  Twist base_velocity{};
  Twist base_acceleration{};
  Wrench tip_wrench{};
  bool apply_gravity = true;
};

struct LinkStates {
  std::vector<Twist> velocity;
  std::vector<Twist> acceleration;
  std::vector<Wrench> force;
};

// Body twists V[i] from the rate recursion
//   V[i] = transport[i-1] * V[i-1] + screw[i] * qdot[i].
std::vector<Twist> propagate_velocities(const ChainKinematics& kin,
                                        const JointVector& qdot,
                                        const Twist& base_velocity,
                                        ScanTrace* trace = nullptr);

// Body accelerations from the differentiated rate recursion; needs the
// twists computed above for the velocity-product source term.
std::vector<Twist> propagate_accelerations(const ChainKinematics& kin,
                                           std::span<const Twist> velocity,
                                           const JointVector& qdot,
                                           const JointVector& qddot,
                                           const Twist& base_acceleration,
                                           ScanTrace* trace = nullptr);

// Interbody wrenches from the tip-to-base force balance.
std::vector<Wrench> propagate_forces(const ChainKinematics& kin,
                                     std::span<const Twist> velocity,
                                     std::span<const Twist> acceleration,
                                     std::span<const SpatialInertia> inertia,
                                     const Wrench& tip_wrench,
                                     ScanTrace* trace = nullptr);

// Variant for callers that already assembled the kinematics and inertias
// (e.g. repeated solves at the same configuration).
JointVector inverse_dynamics_assembled(const ChainKinematics& kin,
                                       std::span<const SpatialInertia> inertia,
                                       const Vec3& gravity,
                                       const JointVector& qdot,
                                       const JointVector& qddot,
                                       const IdOptions& opts = {},
                                       ExecTrace* trace = nullptr);

// Joint torques realizing (qdot, qddot) at configuration q under gravity.
JointVector inverse_dynamics(const RobotChain& chain, const JointVector& q,
                             const JointVector& qdot, const JointVector& qddot,
                             const IdOptions& opts = {},
                             ExecTrace* trace = nullptr);

// Torques with qddot = 0: gravity, centrifugal, and Coriolis load only.
JointVector bias_torque(const RobotChain& chain, const JointVector& q,
                        const JointVector& qdot, ExecTrace* trace = nullptr);

// All intermediate link states of one inverse-dynamics evaluation.
LinkStates link_states(const RobotChain& chain, const JointVector& q,
                       const JointVector& qdot, const JointVector& qddot,
                       const IdOptions& opts = {});

}  // namespace pardyn
