#pragma once

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>

namespace tracefem {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vector = Eigen::VectorXd;

/// Scalar field on R^3.
using ScalarFunction = std::function<double(const Vec3&)>;
/// Vector field on R^3.
using VectorFunction = std::function<Vec3(const Vec3&)>;

/// Raised when a precondition on the problem setup is violated.
class SetupError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an iterative method stops before reaching its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tracefem
