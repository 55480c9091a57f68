#include "pardyn/spatial.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace pardyn {

Mat3 skew(const Vec3& a) {
  Mat3 m;
  m << 0.0, -a.z(), a.y(),
       a.z(), 0.0, -a.x(),
      -a.y(), a.x(), 0.0;
  return m;
}

Mat6 small_adjoint(const Twist& v) {
  Mat6 ad = Mat6::Zero();
  const Mat3 wx = skew(v.angular);
  ad.topLeftCorner<3, 3>() = wx;
  ad.bottomRightCorner<3, 3>() = wx;
  ad.bottomLeftCorner<3, 3>() = skew(v.linear);
  return ad;
}

AdjointMap adjoint_of(const SE3Transform& t) {
  AdjointMap a;
  a.mat.setZero();
  a.mat.topLeftCorner<3, 3>() = t.rotation;
  a.mat.bottomRightCorner<3, 3>() = t.rotation;
  a.mat.bottomLeftCorner<3, 3>() = skew(t.translation) * t.rotation;
  return a;
}

bool SE3Transform::is_valid(double tol) const {
  if (!rotation.allFinite() || !translation.allFinite()) return false;
  const Mat3 gram = rotation.transpose() * rotation;
  if ((gram - Mat3::Identity()).cwiseAbs().maxCoeff() > tol) return false;
  return rotation.determinant() > 0.0;
}

SE3Transform screw_exp(const Twist& s, double q) {
  const Vec3& w = s.angular;
  const Vec3& v = s.linear;
  const double wn = w.norm();

  SE3Transform t;
  if (wn < 1e-12) {
    // Pure translation along the linear part.
    t.translation = q * v;
    return t;
  }

  // Rodrigues for a not-necessarily-unit angular part: the rotation angle
  // is q * |w| about the axis w / |w|.
  const Mat3 wx = skew(w);
  const Mat3 wx2 = wx * wx;
  const double theta = wn * q;
  const double st = std::sin(theta);
  const double ct = std::cos(theta);
  t.rotation = Mat3::Identity() + (st / wn) * wx + ((1.0 - ct) / (wn * wn)) * wx2;
  // Integral of the rotation applied to the linear part.
  t.translation = (q * Mat3::Identity() + ((1.0 - ct) / (wn * wn)) * wx +
                   ((q - st / wn) / (wn * wn)) * wx2) *
                  v;
  return t;
}

SpatialInertia spatial_inertia_from(double mass, const Vec3& com,
                                    const Mat3& inertia_rot) {
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw std::invalid_argument("spatial inertia: mass must be positive");
  }
  if (!com.allFinite() || !inertia_rot.allFinite()) {
    throw std::invalid_argument("spatial inertia: parameters must be finite");
  }
  const double scale = inertia_rot.cwiseAbs().maxCoeff();
  if ((inertia_rot - inertia_rot.transpose()).cwiseAbs().maxCoeff() >
      1e-9 * std::max(scale, 1.0)) {
    throw std::invalid_argument("spatial inertia: rotational inertia must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat3> eig(inertia_rot);
  if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 0.0) {
    throw std::invalid_argument(
        "spatial inertia: rotational inertia must be positive definite");
  }

  const Mat3 cx = skew(com);
  // cx * cx^T has bitwise-equal (i,j)/(j,i) entries; scaling it afterwards
  // keeps the assembled block exactly symmetric, which (mass * cx) * cx^T
  // would not.
  const Mat3 cx_sq = cx * cx.transpose();
  Mat6 m;
  m.topLeftCorner<3, 3>() = inertia_rot + mass * cx_sq;
  m.topRightCorner<3, 3>() = mass * cx;
  m.bottomLeftCorner<3, 3>() = mass * cx.transpose();
  m.bottomRightCorner<3, 3>() = mass * Mat3::Identity();
  return SpatialInertia(m);
}

}  // namespace pardyn
