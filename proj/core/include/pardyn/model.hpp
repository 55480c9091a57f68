#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pardyn/spatial.hpp"
#include "pardyn/types.hpp"

// Serial-chain robot description and its configuration-dependent kinematic
// operators. Links are indexed root to tip; link i is connected to link i-1
// (link 0 to the fixed base) by a one-degree-of-freedom joint whose motion
// is the screw `joint_screw`, expressed in the link-i frame.

namespace pardyn {

struct LinkSpec {
  double mass = 1.0;
  Vec3 com = Vec3::Zero();             // center of mass, link frame
  Mat3 inertia_rot = Mat3::Identity(); // rotational inertia about the COM
  Twist joint_screw{Vec3::UnitZ(), Vec3::Zero()};  // unit 6-norm
  SE3Transform home_transform;  // maps parent-frame coords to link frame at q = 0
};

struct RobotChain {
  std::vector<LinkSpec> links;
  Vec3 gravity = Vec3(0.0, 0.0, -9.81);

  int size() const { return static_cast<int>(links.size()); }
};

// Exact field-for-field comparison; used for round-trip and determinism
// checks, hence bitwise rather than approximate.
bool operator==(const LinkSpec& a, const LinkSpec& b);
bool operator==(const RobotChain& a, const RobotChain& b);

// Configuration-dependent operators of a chain at joint position q.
// rel[i] maps link-(i-1) coordinates into link-i coordinates (rel[0] maps
// base coordinates); transport[i] is the adjoint of rel[i+1] and carries
// link-i twists into the link-(i+1) frame. The screws are copied here so
// the propagation routines need only this struct.
struct ChainKinematics {
  std::vector<SE3Transform> rel;      // n
  AdjointMap base_transport;          // adjoint of rel[0]
  std::vector<AdjointMap> transport;  // n - 1
  std::vector<Twist> screw;           // n

  int size() const { return static_cast<int>(rel.size()); }
};

// Throws ModelError naming the offending link and field if any invariant
// fails: positive mass, SPD rotational inertia, unit-norm screw, valid
// home transform, finite entries.
void validate_chain(const RobotChain& chain);

// Joint transform T_i(q_i) = screw_exp(joint_screw, -q_i) * home_transform:
// the home map followed by the joint displacement, oriented parent-to-link
// so that stacking them propagates quantities toward the tip. Pure in its
// inputs; two calls with equal (chain, q) produce identical results.
ChainKinematics assemble_kinematics(const RobotChain& chain,
                                    const JointVector& q);

// Per-link spatial inertias, in link frames.
std::vector<SpatialInertia> link_inertias(const RobotChain& chain);

// Deterministic random chain: same (n, seed) always yields the bitwise-same
// model. Masses in [0.1, 10], SPD rotational inertias, revolute unit screws
// through the link origin, home transforms with random orientation and
// translation magnitude in [0.1, 1] m.
RobotChain random_chain(int n, std::uint64_t seed);

// JSON model files. Layout:
//   { "n": int, "gravity": [3], "links": [ {
//       "mass": num, "com": [3], "inertia_rot": [9 row-major],
//       "joint_screw": [6, angular then linear],
//       "home_transform": { "rotation": [9 row-major], "translation": [3] }
//   } ... ] }
// load_chain validates and reports the offending link/field on error;
// save_chain writes values so that loading them back reproduces the chain
// exactly.
RobotChain load_chain(const std::string& path);
void save_chain(const RobotChain& chain, const std::string& path);

}  // namespace pardyn
