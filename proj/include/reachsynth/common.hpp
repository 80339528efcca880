#pragma once

#include <Eigen/Dense>

#include <limits>
#include <stdexcept>
#include <string>

namespace reachsynth {

using Index = Eigen::Index;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Absolute tolerance used by every containment predicate unless the caller overrides it.
inline constexpr double kContainmentTol = 1e-9;

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A zonotope too degenerate for the requested operation.
struct DegenerateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AlgebraicLoopError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnboundedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BudgetExhaustedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Measured deviations that the chosen disturbance maps E, F cannot produce.
struct CoverageError : std::runtime_error {
  CoverageError(const std::string& what, Index step) : std::runtime_error(what), step(step) {}
  Index step;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require_dims(bool ok, const char* what) {
  if (!ok) throw DimensionError(what);
}

}  // namespace reachsynth
