#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pardyn {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

// One scalar per joint: positions, rates, accelerations, or torques.
using JointVector = Eigen::VectorXd;

// Problems with a robot description: unreadable file, malformed JSON,
// or parameter values that violate the model invariants.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical failure inside a dynamics computation (non-positive-definite
// inertia, degenerate articulation, diverging solve).
class DynamicsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A pivot block turned out rank deficient during a block elimination.
// Carries enough position information to identify the offending block.
class SingularBlockError : public DynamicsError {
 public:
  SingularBlockError(int round, int index, const std::string& what)
      : DynamicsError(what), round_(round), index_(index) {}

  int round() const noexcept { return round_; }
  int index() const noexcept { return index_; }

 private:
  int round_;
  int index_;
};

// Smallest k with 2^k >= n; the round count of the logarithmic solvers.
inline int ceil_log2(std::size_t n) {
  int k = 0;
  std::size_t p = 1;
  while (p < n) {
    p <<= 1;
    ++k;
  }
  return k;
}

}  // namespace pardyn
