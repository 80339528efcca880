#pragma once

#include "reachsynth/conform.hpp"

#include <cstdint>
#include <functional>
#include <string>

namespace reachsynth {

/**
 * How a controller is wired to the plant. With y_p the plant output and y_c the
 * controller output:
 *   u_c = ctrl_from_plant y_p,   u_p = u_ref + plant_from_ctrl y_c,
 *   y_z = z_from_plant y_p + z_from_ctrl y_c,
 *   y_con = con_from_plant y_p + con_from_ctrl y_c + con_from_ref u_ref.
 * Empty blocks are zero.
 */
struct Wiring {
  Mat ctrl_from_plant;
  Mat plant_from_ctrl;
  Mat z_from_plant, z_from_ctrl;
  Mat con_from_plant, con_from_ctrl, con_from_ref;
  Index z_dim = 0;
  Index con_dim = 0;
};

struct ControllerTemplate {
  std::vector<std::string> names;
  Vec lower, upper, start;
  std::function<LtiSystem(const Vec&)> build;
  Wiring wiring;
};

/// Closed loop with input u_ref and output [y_z; y_con].
struct ClosedLoop {
  LtiSystem system;
  Index z_dim = 0;
  Index con_dim = 0;
};

ClosedLoop closed_loop(const LtiSystem& plant, const LtiSystem& controller, const Wiring& wiring);

struct SynthesisProblem {
  LtiSystem plant;
  ControllerTemplate tmpl;
  Polytope y_c;                   // over y_con; no rows means unconstrained
  std::optional<Zonotope> x0;     // closed-loop initial set, default the origin
  std::optional<double> tol;      // hull convergence tolerance, see TerminalOptions
  Index k_max = 500;
  Index budget = 400;
  Index starts = 3;
  std::uint64_t seed = 0;
  double constraint_tol = kContainmentTol;
  // Optional free plant entries, identified per evaluation in synth_with_identification.
  std::vector<FreeEntry> plant_entries;
};

struct SynthEval {
  bool built = false;       // closed loop constructed without algebraic loop
  bool converged = false;
  bool feasible = false;
  double cost = 0.0;        // side-length sum of the y_z hull of the terminal set
  double margin = 0.0;      // worst constraint margin over all steps
  Index converged_at = -1;
  Interval z_hull;
};

SynthEval evaluate_controller(const SynthesisProblem& p, const Vec& theta);

struct SynthResult {
  Vec theta;
  double cost = 0.0;
  Index converged_at = -1;
  double max_margin = 0.0;
  Index evaluations = 0;
  Interval z_hull;
  bool verified = false;  // constraints re-checked with explicit zonotopes
};

/// Throws BudgetExhaustedError when no feasible, convergent controller is found.
SynthResult synth_controller(const SynthesisProblem& p);

/// Re-checks R_con[k] in Y_c for k up to convergence with explicit zonotope recursion.
bool verify_constraints(const SynthesisProblem& p, const Vec& theta, Index steps);

struct IdentifiedSynthesis {
  SynthResult synth;
  IdentResult ident;
  LtiSystem plant;  // plant with identified disturbances (and entries)
};

/// Identify W, V of the plant from the suite, then synthesize on the identified plant.
IdentifiedSynthesis synth_with_identification(const SynthesisProblem& p, const TestSuite& suite,
                                              const DeviationOptions& dev, const IdentOptions& ident = {});

enum class IterationVerdict { converged, infeasible, iteration_limit };
const char* to_string(IterationVerdict v);

struct IterationRow {
  Index iteration = 0;
  bool synthesized = false;
  double cost = 0.0;
  Vec theta;
  double ident_cost = 0.0;
  Vec alpha_w, alpha_v;
  bool conformant = false;  // new plant data inside the identified model
  double margin = 0.0;      // conformance margin on the new data
  std::string status;       // "converged", "not conformant", "infeasible: ..."
};

struct IterativeResult {
  IterationVerdict verdict = IterationVerdict::iteration_limit;
  std::vector<IterationRow> rows;
  Index plant_runs = 0;
  std::optional<IdentifiedSynthesis> final;
};

struct IterativeOptions {
  Index max_iters = 3;
  // A candidate is declared infeasible once its identification cost exceeds this
  // multiple of the first iteration's cost.
  double infeasible_factor = 10.0;
};

using PlantRunner = std::function<TestSuite(const Vec& theta)>;

IterativeResult iterative_synthesis(const SynthesisProblem& p, const TestSuite& initial_suite,
                                    const PlantRunner& plant_runner, const DeviationOptions& dev,
                                    const IdentOptions& ident = {}, const IterativeOptions& options = {});

// ---- observer transient synthesis ------------------------------------------

struct ObserverTransientProblem {
  std::function<LtiSystem(const Vec&)> build;  // discrete observer, V on its input
  Zonotope x0;
  Polytope y_s;  // steady-state bound over the observer outputs
  Vec lower, upper, start;
  std::optional<double> tol;
  Index k_max = 5000;
  Index budget = 300;
  Index starts = 4;
  std::uint64_t seed = 0;
};

struct TransientEval {
  bool converged = false;
  bool feasible = false;
  Index converged_at = -1;
  double t_inf = 0.0;
  double margin = 0.0;  // terminal set against Y_s
  Interval terminal_hull;
};

TransientEval evaluate_transient(const ObserverTransientProblem& p, const Vec& theta);

struct TransientResult {
  Vec theta;
  double t_inf = 0.0;
  Index converged_at = -1;
  Interval terminal_hull;
  Index evaluations = 0;
};

/// Minimizes the convergence time of the observer reach set subject to terminal set in Y_s.
TransientResult observer_transient_synthesis(const ObserverTransientProblem& p);

/// U_ref + Y_c inside U_p, all boxes.
bool input_split_valid(const Interval& u_ref, const Interval& y_c, const Interval& u_p, double tol = 1e-12);

}  // namespace reachsynth
