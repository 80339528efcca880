#pragma once

#include "reachsynth/zonotope.hpp"

#include <optional>
#include <string>
#include <vector>

namespace reachsynth {

/**
 * x' = A x + B u + E w,   y = C x + D u + F v,   w in W, v in V.
 *
 * `x'` is the derivative for continuous systems and the successor state for
 * discrete ones (sample_time set). Sequences are stored as matrices with one
 * row per time step.
 */
struct LtiSystem {
  Mat A, B, C, D, E, F;
  Zonotope W, V;
  std::optional<double> sample_time;
  std::vector<std::string> w_labels;
  std::vector<std::string> v_labels;

  LtiSystem() = default;
  /// Disturbance-free system; W and V are zero-dimensional.
  LtiSystem(Mat A, Mat B, Mat C, Mat D, std::optional<double> sample_time = std::nullopt);
  LtiSystem(Mat A, Mat B, Mat C, Mat D, Mat E, Mat F, Zonotope W, Zonotope V,
            std::optional<double> sample_time = std::nullopt);

  Index states() const { return A.rows(); }
  Index inputs() const { return B.cols(); }
  Index outputs() const { return C.rows(); }
  Index w_dim() const { return E.cols(); }
  Index v_dim() const { return F.cols(); }
  bool is_discrete() const { return sample_time.has_value(); }

  void validate() const;
  LtiSystem with_disturbances(Zonotope w, Zonotope v) const;
};

/// Static gain y = D u (no state).
LtiSystem static_gain(const Mat& d, std::optional<double> sample_time = std::nullopt);
/// One-sample delay of a `dim`-vector: x' = u, y = x.
LtiSystem unit_delay(Index dim, double sample_time);

Mat expm(const Mat& m);

/// Exact zero-order-hold discretization (u, w and v held over each sample).
LtiSystem discretize(const LtiSystem& sys, double dt);

/**
 * General interconnection of two subsystems with external input r:
 *   u1 = r_to_u1 r + y2_to_u1 y2,   u2 = r_to_u2 r + y1_to_u2 y1,
 *   z  = y1_to_z y1 + y2_to_z y2 + r_to_z r.
 * Empty matrices mean zero blocks of the right shape.
 *
 * State is [x1; x2]. Each disturbance block w1, v1, w2, v2 is routed as a whole:
 * w blocks stay process disturbances; a v block becomes a process disturbance if
 * it reaches the state and stays a measurement error if it reaches z (both if both).
 */
struct Interconnection {
  Index external_inputs = 0;
  Index outputs = 0;
  Mat r_to_u1, r_to_u2, y2_to_u1, y1_to_u2, y1_to_z, y2_to_z, r_to_z;
};

LtiSystem interconnect(const LtiSystem& s1, const LtiSystem& s2, const Interconnection& wiring);

/// s1 output drives s2 input; input of s1, output of s2.
LtiSystem series(const LtiSystem& s1, const LtiSystem& s2);
/// u1 = r + y2, u2 = y1; output y1.
LtiSystem feedback(const LtiSystem& s1, const LtiSystem& s2);

struct Trajectory {
  Mat states;   // (T+1) x n, row k = x[k]
  Mat outputs;  // T x q, row k = y[k]
};

/// Simulates T = u.rows() steps. Empty w or v sequences mean zero disturbance.
Trajectory simulate(const LtiSystem& sys, const Vec& x0, const Mat& u, const Mat& w = Mat(), const Mat& v = Mat());

/// Disturbance-free output y*[k] for k = 0 .. u.rows()-1.
Mat nominal_output(const LtiSystem& sys, const Vec& x0, const Mat& u);

struct DisturbanceMaps {
  std::vector<Mat> ebar;  // ebar[i] = C A^i E
  Mat j;                  // [ebar_0, ..., ebar_{k-1}, F]
};

/**
 * One recorded experiment. `states` optionally holds the state at every step
 * (row k = x[k], row 0 = initial_state); it enables sliding-window expansion.
 */
struct TestCase {
  Mat inputs;   // T x m
  Vec initial_state;
  Mat outputs;  // T x q
  Mat states;   // T x n or empty

  Index steps() const { return outputs.rows(); }
};

struct TestSuite {
  std::vector<TestCase> cases;
  double sample_time = 0.0;

  void validate(const LtiSystem& sys) const;
};

DisturbanceMaps disturbance_maps(const LtiSystem& sys, Index k);

double spectral_radius(const Mat& a);

}  // namespace reachsynth
