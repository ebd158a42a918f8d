#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace vpp {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using CRowVector = Eigen::RowVectorXcd;
using RVector = Eigen::VectorXd;

// Relative singular-value cutoff below which a matrix is treated as rank deficient.
inline constexpr double kRankTol = 1e-10;

struct RankDeficient : std::runtime_error {
  explicit RankDeficient(const std::string& what) : std::runtime_error(what) {}
};

struct SingularGenerator : std::runtime_error {
  explicit SingularGenerator(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateBasis : std::runtime_error {
  explicit DegenerateBasis(const std::string& what) : std::runtime_error(what) {}
};

struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

struct BoxTooSmall : std::runtime_error {
  explicit BoxTooSmall(const std::string& what, int needed = 0)
      : std::runtime_error(what), needed_radius(needed) {}
  int needed_radius;  // smallest certifying box radius, 0 if unknown
};

struct TooManyUsers : std::runtime_error {
  explicit TooManyUsers(const std::string& what) : std::runtime_error(what) {}
};

struct NoActiveUsers : std::runtime_error {
  explicit NoActiveUsers(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace vpp
