#pragma once

#include "reachsynth/common.hpp"

namespace reachsynth {

/**
 * min cost . x   s.t.  A x >= b,  lower <= x <= upper.
 *
 * Bounds may be infinite. Row count may be large relative to the variable
 * count; the solver then works on a growing subset of rows.
 */
struct LinearProgram {
  Vec cost;
  Mat a;
  Vec b;
  Vec lower;
  Vec upper;

  LinearProgram() = default;
  /// Variables default to lower = 0, upper = +inf.
  LinearProgram(Vec cost, Mat a, Vec b);

  Index num_variables() const { return cost.size(); }
  Index num_rows() const { return a.rows(); }
  void validate() const;
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpStats {
  Index rows = 0;
  Index variables = 0;
  Index active_rows = 0;      // rows in the final working set
  Index rounds = 0;           // constraint-generation rounds
  Index pivots = 0;
  double seconds = 0.0;
};

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  Vec x;
  double cost = kInf;
  double max_violation = 0.0;  // over all rows and bounds, unscaled
  LpStats stats;

  bool optimal() const { return status == LpStatus::optimal; }
};

struct LpOptions {
  double feasibility_tol = 1e-9;
  // Row subsets are used once the problem has more rows than this.
  Index working_set_threshold = 400;
  Index rows_per_round = 64;
};

LpSolution solve_lp(const LinearProgram& lp, const LpOptions& options = {});

const char* to_string(LpStatus status);

}  // namespace reachsynth
