#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace iscc {

using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline double dist(const Vec2& a, const Vec2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

/// Raised when a configuration or experiment spec is invalid.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a structured-text file cannot be parsed; the message names
/// the offending field where one can be identified.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when the sensing SINR threshold cannot be met by any beamformer
/// the initialization procedure can construct for a scenario.
class GammaInfeasibleError : public std::runtime_error {
 public:
  explicit GammaInfeasibleError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace iscc
