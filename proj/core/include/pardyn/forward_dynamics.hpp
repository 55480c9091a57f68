#pragma once

#include <span>
#include <string>
#include <vector>

#include "pardyn/inverse_dynamics.hpp"
#include "pardyn/model.hpp"
#include "pardyn/oee.hpp"
#include "pardyn/trace.hpp"

// Forward dynamics of a serial chain: given joint torques, compute the
// joint accelerations. Three interchangeable algorithms are provided; they
// must agree numerically and differ only in cost and dependency structure.
//
//  - jsiia: build the joint-space inertia column by column through inverse
//    dynamics, then solve the dense SPD system.
//  - abia: articulated-body inertias (an inherently sequential tip-to-base
//    recursion) followed by two scan-accelerated bi-diagonal sweeps.
//  - cfa: eliminate the joint-space coupling entirely — project the block
//    tri-diagonal compliance operator onto constraint and joint subspaces
//    and solve the constraint system with odd-even elimination. No stage
//    walks the chain sequentially.

namespace pardyn {

using Vec5 = Eigen::Matrix<double, 5, 1>;

enum class FdAlgo { jsiia, abia, cfa };

// Dense joint-space inertia at configuration q. Column j is the torque
// needed for unit acceleration of joint j from rest with gravity switched
// off; the result is symmetrized before being returned.
Eigen::MatrixXd joint_space_inertia(const RobotChain& chain,
                                    const JointVector& q,
                                    ExecTrace* trace = nullptr);

JointVector jsiia_forward_dynamics(const RobotChain& chain,
                                   const JointVector& q,
                                   const JointVector& qdot,
                                   const JointVector& tau,
                                   ExecTrace* trace = nullptr);

// Articulated-body inertia of every link: the inertia felt at link i when
// all joints beyond it are free. joint_inertia[i] = S_i^T abi[i] S_i and
// gain[i] = abi[i] S_i / joint_inertia[i] are the per-joint quantities the
// sweeps need.
struct ArticulatedBodyInertias {
  std::vector<Mat6> inertia;
  Eigen::VectorXd joint_inertia;
  std::vector<Vec6> gain;
};

ArticulatedBodyInertias articulated_body_inertias(
    const ChainKinematics& kin, std::span<const SpatialInertia> inertia,
    ExecTrace* trace = nullptr);

JointVector abia_forward_dynamics(const RobotChain& chain,
                                  const JointVector& q,
                                  const JointVector& qdot,
                                  const JointVector& tau,
                                  ExecTrace* trace = nullptr);

// Orthonormal complement of each joint screw: basis[i] is 6x5 with
// basis[i]^T screw[i] = 0, so [basis[i] screw[i]] is an orthogonal 6x6.
// Computed by a deterministic Householder factorization of the screw.
struct ConstraintBasis {
  std::vector<Eigen::Matrix<double, 6, 5>> basis;
};

ConstraintBasis build_constraint_basis(const RobotChain& chain);

// Projections of the block tri-diagonal compliance operator
// (I - G) J^{-1} (I - G)^T, where G carries the inter-link transports:
//   constraint_op = basis^T core basis   (5x5 blocks, SPD)
//   cross_*       = basis^T core screw   (5x1 blocks)
//   joint_*       = screw^T core screw   (scalars)
// Assembled link by link; every block needs only data from its own link
// and its parent.
struct CfaOperators {
  SymBlockTriDiagSystem<5> constraint_op;
  std::vector<Vec5> cross_sub;    // n-1: couples row i+1 to column i
  std::vector<Vec5> cross_diag;   // n
  std::vector<Vec5> cross_super;  // n-1: couples row i to column i+1
  Eigen::VectorXd joint_diag;     // n
  Eigen::VectorXd joint_off;      // n-1

  std::vector<Vec5> apply_cross(const JointVector& v) const;
  JointVector apply_cross_transpose(std::span<const Vec5> f) const;
  JointVector apply_joint(const JointVector& v) const;
};

CfaOperators build_cfa_operators(const RobotChain& chain,
                                 const ChainKinematics& kin,
                                 const ConstraintBasis& basis,
                                 ExecTrace* trace = nullptr);

JointVector cfa_forward_dynamics(const RobotChain& chain, const JointVector& q,
                                 const JointVector& qdot,
                                 const JointVector& tau,
                                 ExecTrace* trace = nullptr);

JointVector forward_dynamics(const RobotChain& chain, const JointVector& q,
                             const JointVector& qdot, const JointVector& tau,
                             FdAlgo algo, ExecTrace* trace = nullptr);

// Batch evaluation over independent problems. Problems are evaluated in
// parallel; each result is written to its own slot, so the output is
// identical for any worker count. A failing problem reports its error in
// place without disturbing the others.
struct FdProblem {
  RobotChain chain;
  JointVector q;
  JointVector qdot;
  JointVector tau;
};

struct FdResult {
  JointVector qddot;
  std::string error;

  bool ok() const { return error.empty(); }
};

std::vector<FdResult> batch_forward_dynamics(std::span<const FdProblem> problems,
                                             FdAlgo algo);

}  // namespace pardyn
