#pragma once

#include <Eigen/Core>

#include "pardyn/types.hpp"

// Spatial (6-D) rigid-body algebra. Every 6-vector in the library stacks
// the rotational part on top of the translational part: a Twist is
// (angular velocity, linear velocity), a Wrench is (moment, force).
// All 6x6 operators follow the same block order.

namespace pardyn {

// Rigid-body velocity, or any velocity-like screw quantity.
struct Twist {
  Vec3 angular = Vec3::Zero();
  Vec3 linear = Vec3::Zero();

  Twist() = default;
  Twist(const Vec3& ang, const Vec3& lin) : angular(ang), linear(lin) {}

  static Twist from_stacked(const Vec6& v) {
    return {v.template head<3>(), v.template tail<3>()};
  }
  Vec6 stacked() const {
    Vec6 v;
    v << angular, linear;
    return v;
  }
  bool is_finite() const {
    return angular.allFinite() && linear.allFinite();
  }
};

inline Twist operator+(const Twist& a, const Twist& b) {
  return {a.angular + b.angular, a.linear + b.linear};
}
inline Twist operator-(const Twist& a, const Twist& b) {
  return {a.angular - b.angular, a.linear - b.linear};
}
inline Twist operator*(double s, const Twist& a) {
  return {s * a.angular, s * a.linear};
}

// Generalized force, ordered dually to Twist so that power = F . V.
struct Wrench {
  Vec3 moment = Vec3::Zero();
  Vec3 force = Vec3::Zero();

  Wrench() = default;
  Wrench(const Vec3& m, const Vec3& f) : moment(m), force(f) {}

  static Wrench from_stacked(const Vec6& v) {
    return {v.template head<3>(), v.template tail<3>()};
  }
  Vec6 stacked() const {
    Vec6 v;
    v << moment, force;
    return v;
  }
  bool is_finite() const { return moment.allFinite() && force.allFinite(); }
};

inline Wrench operator+(const Wrench& a, const Wrench& b) {
  return {a.moment + b.moment, a.force + b.force};
}
inline Wrench operator-(const Wrench& a, const Wrench& b) {
  return {a.moment - b.moment, a.force - b.force};
}
inline Wrench operator*(double s, const Wrench& a) {
  return {s * a.moment, s * a.force};
}

// Proper rigid transform: x_target = rotation * x_source + translation.
struct SE3Transform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  // Composition: (a * b)(x) = a(b(x)).
  SE3Transform operator*(const SE3Transform& rhs) const {
    return {rotation * rhs.rotation, rotation * rhs.translation + translation};
  }
  SE3Transform inverse() const {
    return {rotation.transpose(), -(rotation.transpose() * translation)};
  }
  Vec3 apply(const Vec3& point) const { return rotation * point + translation; }

  Eigen::Matrix4d homogeneous() const {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m.topLeftCorner<3, 3>() = rotation;
    m.topRightCorner<3, 1>() = translation;
    return m;
  }

  // Rotation orthonormal with determinant +1, translation finite.
  bool is_valid(double tol = 1e-9) const;
};

// Frame-change operator for twists. For T mapping source coordinates to
// target coordinates, apply() carries a twist expressed in the source frame
// into the target frame; transpose_apply() carries a wrench the other way.
struct AdjointMap {
  Mat6 mat = Mat6::Identity();

  Twist apply(const Twist& v) const { return Twist::from_stacked(mat * v.stacked()); }
  Wrench transpose_apply(const Wrench& f) const {
    return Wrench::from_stacked(mat.transpose() * f.stacked());
  }
};

// Inertia of one rigid link as a 6x6 symmetric positive definite operator
// mapping twists to momenta. Built by spatial_inertia_from().
class SpatialInertia {
 public:
  SpatialInertia() : mat_(Mat6::Identity()) {}

  const Mat6& matrix() const { return mat_; }
  Wrench apply(const Twist& v) const {
    return Wrench::from_stacked(mat_ * v.stacked());
  }

 private:
  explicit SpatialInertia(const Mat6& m) : mat_(m) {}
  friend SpatialInertia spatial_inertia_from(double mass, const Vec3& com,
                                             const Mat3& inertia_rot);
  Mat6 mat_;
};

// Cross-product matrix: skew(a) * b == a x b.
Mat3 skew(const Vec3& a);

// Lie bracket operator ad_V = [[skew(w), 0], [skew(v), skew(w)]] for
// V = (w, v). ad_V * U is the derivative coupling between two twists;
// its transpose acts on wrenches.
Mat6 small_adjoint(const Twist& v);

// Adjoint of a rigid transform: [[R, 0], [skew(p) R, R]].
AdjointMap adjoint_of(const SE3Transform& t);

// Exponential of the screw `s` scaled by the joint coordinate q: the pose
// reached by sliding/rotating along the screw axis. Handles both the
// rotational case (finite angular part) and the pure-translation case.
SE3Transform screw_exp(const Twist& s, double q);

// Assemble the 6x6 inertia from mass, center of mass (in the link frame),
// and the rotational inertia about the center of mass. Throws
// std::invalid_argument for non-positive mass or a rotational inertia that
// is not symmetric positive definite.
SpatialInertia spatial_inertia_from(double mass, const Vec3& com,
                                    const Mat3& inertia_rot);

}  // namespace pardyn
