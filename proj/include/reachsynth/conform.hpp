#pragma once

#include "reachsynth/dfo.hpp"
#include "reachsynth/lp.hpp"
#include "reachsynth/reach.hpp"

#include <vector>

namespace reachsynth {

/// A deviation sample y_a = y - y* together with where it came from.
struct DeviationPoint {
  Vec y;
  Index case_index = 0;
  Index window_start = 0;
};

struct DeviationOptions {
  Index k_end = 0;
  bool sliding_windows = false;  // every step with a recorded state starts a new case
  Index window_stride = 1;
  bool aggregate = true;         // keep only points that can be extreme in some direction
  int threads = 1;
};

/**
 * Output deviations of a suite from the nominal model response, gathered per
 * horizon step k. With aggregation, only 1-D extremes or 2-D convex hull
 * vertices are kept; every linear constraint that holds on them holds on all.
 */
class DeviationData {
 public:
  DeviationData() = default;
  DeviationData(Index k_end, Index output_dim, bool aggregate);

  void add(Index k, const Vec& y, Index case_index, Index window_start);
  void merge(const DeviationData& other);
  void finalize();

  Index k_end() const { return k_end_; }
  Index output_dim() const { return q_; }
  Index windows() const { return windows_; }
  Index samples() const { return samples_; }
  bool aggregated() const { return aggregate_; }
  const std::vector<DeviationPoint>& points(Index k) const { return points_[k]; }
  /// Largest |y_a| entry over all stored points.
  double max_abs() const;

  void count_window() { ++windows_; }

 private:
  void compact(Index k);

  Index k_end_ = 0;
  Index q_ = 0;
  bool aggregate_ = true;
  Index windows_ = 0;
  Index samples_ = 0;
  std::vector<std::vector<DeviationPoint>> points_;
  std::vector<std::size_t> compacted_size_;
};

DeviationData build_deviation_data(const LtiSystem& sys, const TestSuite& suite, const DeviationOptions& options);

// ---- conformance check ------------------------------------------------------

struct Violation {
  Index case_index = 0;
  Index window_start = 0;
  Index step = 0;
  double margin = 0.0;
};

struct ConformanceReport {
  bool pass = true;
  double max_margin = -kInf;  // max over steps and facets of N y_a - d; positive = violation
  std::vector<Violation> violations;  // worst offenders, at most max_reported
  Index windows = 0;
  Index points_checked = 0;
};

struct ConformanceOptions {
  double tol = 1e-9;
  Index max_reported = 100;
};

ConformanceReport check_conformance(const LtiSystem& sys, const DeviationData& data,
                                    const ConformanceOptions& options = {});
ConformanceReport check_conformance(const LtiSystem& sys, const TestSuite& suite, Index k_end,
                                    const DeviationOptions& dev = {}, const ConformanceOptions& options = {});

// ---- identification ---------------------------------------------------------

struct IdentOptions {
  bool free_centers = true;           // false pins c_W = c_V = 0
  std::optional<Vec> alpha_w_fixed;   // pin the W scales
  std::optional<Vec> alpha_v_fixed;   // pin the V scales
  double zero_row_tol = 1e-9;         // data tolerance along directions no channel reaches
  LpOptions lp;
  bool self_check = true;
};

/// Variable layout xi = [c_W, c_V, alpha_W, alpha_V].
struct IdentLp {
  LinearProgram lp;
  Index w = 0, v = 0, pw = 0, pv = 0;
  Index zero_rows = 0;  // rows with no free coefficient, checked against the data and dropped
};

IdentLp build_ident_lp(const LtiSystem& sys, const DeviationData& data, const IdentOptions& options = {});

struct IdentResult {
  Vec c_w, c_v, alpha_w, alpha_v;
  double cost = 0.0;
  Vec output_cost;  // contribution of each output channel to the cost
  LpStats lp_stats;
  LtiSystem model;  // input system with the identified W, V
  bool conformant = false;
  double max_margin = -kInf;
  Index windows = 0;
};

/// Cost sum_k t_s znorm(R_a[k]) of the deviation tube over k = 0..k_end.
double tube_cost(const LtiSystem& sys, Index k_end);
Vec tube_cost_per_output(const LtiSystem& sys, Index k_end);

IdentResult identify_uncertainty(const LtiSystem& sys, const DeviationData& data, const IdentOptions& options = {});
IdentResult identify_uncertainty(const LtiSystem& sys, const TestSuite& suite, const DeviationOptions& dev,
                                 const IdentOptions& options = {});

enum class SystemMatrix { A, B, C, D, E, F, GW, GV };

struct FreeEntry {
  SystemMatrix matrix = SystemMatrix::A;
  Index row = 0;
  Index col = 0;
  double lower = 0.0;
  double upper = 0.0;
};

/// Copy of `sys` with the listed entries set to theta (G'_W / G'_V entries edit the templates).
LtiSystem apply_entries(const LtiSystem& sys, const std::vector<FreeEntry>& entries, const Vec& theta);

struct FullIdentResult {
  LtiSystem model;
  IdentResult inner;
  Vec theta;
  Index evaluations = 0;
};

/**
 * Outer derivative-free search over matrix entries, inner LP per evaluation.
 * A continuous template is discretized with the suite sample time after each substitution.
 */
FullIdentResult identify_full(const LtiSystem& tmpl, const std::vector<FreeEntry>& entries, const TestSuite& suite,
                              const DeviationOptions& dev, Index budget, const DfoOptions& dfo = {},
                              const IdentOptions& options = {});

// ---- coverage ---------------------------------------------------------------

struct StepCoverage {
  Index step = 0;
  Index rank = 0;
  bool full_rank = false;
  double max_residual = 0.0;
  Index worst_case = -1;
  Index worst_start = -1;
};

struct CoverageReport {
  bool covered = true;
  double tol = 0.0;
  std::vector<StepCoverage> steps;
  std::vector<Index> flagged_steps;
};

/// Residual |y_a - J_k J_k^+ y_a| per step; steps with residual above tol are flagged.
CoverageReport coverage_check(const LtiSystem& sys, const DeviationData& data, double tol = 1e-9);

}  // namespace reachsynth
