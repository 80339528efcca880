#pragma once

#include "reachsynth/lti_system.hpp"

#include <optional>
#include <string>
#include <vector>

namespace reachsynth {

struct ReachSequence {
  std::vector<Zonotope> sets;  // R[0..k_end]
  double sample_time = 0.0;
  std::optional<Index> converged_at;
};

struct StepSets {
  Zonotope state;   // X_{k+1}
  Zonotope output;  // C X_{k+1} + D u_k + F V
};

StepSets reach_step(const LtiSystem& sys, const Zonotope& x_k, const Vec& u_k);

/// Output sets R[0..k_end] from initial set x0 under inputs u (rows 0..k_end).
ReachSequence reach_horizon(const LtiSystem& sys, const Zonotope& x0, const Mat& u, Index k_end);

/// State sets X[0..k_end] (same recursion as reach_horizon).
std::vector<Zonotope> reach_states(const LtiSystem& sys, const Zonotope& x0, const Mat& u, Index k_end);

/// Deviation set R_a[k] = (sum_i Ebar_i c_W + F c_V, [Ebar_0 G_W, ..., Ebar_{k-1} G_W, F G_V]).
Zonotope deviation_reach(const LtiSystem& sys, Index k);

/// Deviation sets R_a[0..k_end], sharing the Ebar recursion.
std::vector<Zonotope> deviation_reach_sequence(const LtiSystem& sys, Index k_end);

struct TerminalOptions {
  std::optional<double> tol;  // absolute hull tolerance; default 1e-6 * znorm of the state hull
  Index k_max = 5000;
  std::optional<Polytope> constraint;  // over the full output vector, checked at every step
  bool keep_set = true;                // false: only hulls and margins are produced
  // Accumulated disturbance generators are boxed every `collapse_every` steps after `collapse_after`.
  Index collapse_after = 500;
  Index collapse_every = 100;
  double divergence_bound = 1e12;
};

enum class TerminalStatus { converged, diverged, step_limit };

struct TerminalResult {
  TerminalStatus status = TerminalStatus::step_limit;
  Index converged_at = -1;   // first k with hull X_{k+1} equal to hull X_k within tol
  Index steps = 0;           // number of reach steps taken
  Interval output_hull;      // hull of the output set at the last step
  Interval state_hull;
  std::optional<Zonotope> output_set;  // when keep_set
  std::optional<Zonotope> state_set;
  double max_margin = -kInf;       // worst constraint margin over all visited steps
  double final_margin = -kInf;     // constraint margin of the last output set
  Index last_violation = -1;       // last step whose output set violated the constraint

  bool converged() const { return status == TerminalStatus::converged; }
};

/**
 * Zero-input reach iteration from X0 until the interval hull of the state set
 * stops changing. The returned output set is R at step converged_at + 1.
 */
TerminalResult terminal_reach_run(const LtiSystem& sys, const Zonotope& x0, const TerminalOptions& options = {});

/// Same as terminal_reach_run but throws NonConvergenceError unless converged.
TerminalResult terminal_reach(const LtiSystem& sys, const Zonotope& x0, const TerminalOptions& options = {});

const char* to_string(TerminalStatus status);

/// CSV rows "k,dim,lower,upper" of the interval hulls of a sequence.
std::string reach_csv(const std::vector<Zonotope>& sets);

}  // namespace reachsynth
