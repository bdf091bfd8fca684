#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace solo9 {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using VecX = Eigen::VectorXd;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using MatX = Eigen::MatrixXd;
using Quat = Eigen::Quaterniond;

/// Error raised when a config or dataset file cannot be parsed.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& file, int line, const std::string& what)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + what),
        file_(file), line_(line) {}
  const std::string& file() const { return file_; }
  int line() const { return line_; }

 private:
  std::string file_;
  int line_;
};

/// Error raised when loaded data violates a documented invariant.
class ValidationError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Error raised by the dynamics core on non-finite state or input.
class SimulationError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline bool all_finite(const Eigen::Ref<const VecX>& v) { return v.allFinite(); }

}  // namespace solo9
