#pragma once

#include "reachsynth/common.hpp"

#include <cstdint>
#include <functional>

namespace reachsynth {

struct DfoEval {
  double cost = 0.0;
  bool feasible = true;
  double margin = 0.0;  // constraint violation, > 0 when infeasible
};

/// Box-constrained minimization of a black-box objective.
struct DfoProblem {
  std::function<DfoEval(const Vec&)> objective;
  Vec lower;
  Vec upper;
  Vec start;
  Index budget = 500;
};

struct DfoOptions {
  Index starts = 1;            // first start is problem.start, the rest are seeded draws in the box
  std::uint64_t seed = 0;
  double xtol = 1e-7;          // simplex diameter in normalized box coordinates
  double initial_step = 0.1;   // fraction of each box side
  double penalty = 1e3;        // infeasible points score cost + penalty * margin
};

struct DfoResult {
  Vec x;
  double cost = 0.0;
  double margin = 0.0;
  Index evaluations = 0;
  Index starts_completed = 0;
};

/// Nelder-Mead with restarts. Throws BudgetExhaustedError if no feasible point was seen.
DfoResult minimize_dfo(const DfoProblem& problem, const DfoOptions& options = {});

}  // namespace reachsynth
