#pragma once

// Single-joint robot case study: model candidates, a synthetic lab plant that
// generates test data, reference trajectories and controller templates.

#include "reachsynth/synth.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace reachsynth {

// R-, R+, RO-, RO+, RD+, ROD+
enum class JointModelKind { Rc, Rd, ROc, ROd, RDd, RODd };

const char* to_string(JointModelKind kind);
/// Accepts "Rd", "R+", "rodd", "ROD+", ...; throws ConfigError.
JointModelKind parse_kind(const std::string& name);
std::vector<JointModelKind> all_kinds();

bool has_observer(JointModelKind kind);
bool has_delay(JointModelKind kind);
bool is_discrete_kind(JointModelKind kind);

struct ObserverGains {
  double h1t = 15.0;
  double h2t = 30.0;
  double eps = 0.01;

  double h1() const { return h1t / eps; }
  double h2() const { return h2t / (eps * eps); }
};

/// Continuous double integrator x = [q, qd], W in R^2 (E = I), y = q + v.
LtiSystem robot_model();
/// Continuous high-gain observer, input measured position, outputs [q_hat, qd_hat].
LtiSystem observer_model(const ObserverGains& gains);
/// Bilinear (Tustin) discretization of observer_model; state x_hat - D m, output x_hat.
LtiSystem discrete_observer(const ObserverGains& gains, double dt);

struct CandidateParams {
  double dt = 0.004;
  ObserverGains observer;
};

/**
 * Candidate plant with input u_r and the two outputs [position, velocity] seen by
 * the controller. W and V keep identity templates with unit scales; candidates
 * without observer carry a 2-D measurement error on both outputs. Continuous
 * kinds are returned continuous.
 *
 * State order: [delay-in], robot q, qd, [delay-out], [observer q_hat, qd_hat].
 */
LtiSystem build_candidate(JointModelKind kind, const CandidateParams& params);
/// build_candidate, discretized at params.dt for continuous kinds.
LtiSystem build_candidate_discrete(JointModelKind kind, const CandidateParams& params);

// ---- references -------------------------------------------------------------

/// Sampled desired trajectory; columns q_d, qd_d, qdd_d (qdd_d constant on [k, k+1)).
struct Reference {
  Mat samples;
  double dt = 0.004;

  Index steps() const { return samples.rows(); }
};

struct ReferenceConfig {
  Index count = 10;
  double duration = 5.0;  // seconds per reference
  double max_pos = 1.0;
  double max_vel = 1.5;
  double max_acc = 3.0;
  double max_dwell = 0.3;
  double trapezoid_share = 0.5;  // fraction of segments with trapezoidal velocity, rest quintic
  double dt = 0.004;
};

/// Rest-to-rest trapezoidal velocity profile with phase lengths on the sample grid.
Reference trapezoid(double q0, double q1, double max_vel, double max_acc, double dt);
/// Rest-to-rest quintic polynomial of duration t_total.
Reference quintic(double q0, double q1, double t_total, double dt);
std::vector<Reference> gen_references(std::uint64_t seed, const ReferenceConfig& config);

// ---- synthetic lab plant ----------------------------------------------------

struct LabConfig {
  double dt = 0.004;
  ObserverGains observer;
  double omega = 20.0;
  double zeta = 0.65;
  Vec w_half = (Vec(2) << 0.005, 1.0).finished();  // true disturbance box half widths
  Vec w_center = Vec::Zero(2);
  double vertex_share = 0.2;
  double w_hold_mean = 100.0;  // mean steps a disturbance value is held; 1 draws every step
  double quantization = 3.4906585e-5;  // encoder step, rad (2 millidegrees)
  Index delay_in = 1;
  Index delay_out = 1;
  double stop_error = 0.5;  // emergency stop on |q - q_d| above this
  double stop_input = 1e3;  // or |u| above this
};

/// Columns of LabCase::lab_states.
/// kXi* is the internal state of the discrete observer.
enum LabColumn : Index { kUPrev = 0, kQ, kQd, kMPrev, kQHat, kQdHat, kXi1, kXi2, kLabColumns };

struct LabCase {
  Mat inputs;      // T x 1, commanded u_r
  Mat outputs;     // T x 2, [q_hat, qd_hat]
  Mat lab_states;  // T x kLabColumns
  Mat reference;   // T x 3
  bool stopped = false;
};

struct LabSuite {
  std::vector<LabCase> cases;
  double dt = 0.004;
  Index stopped_cases() const;
  Index total_steps() const;
};

LabSuite simulate_lab(const LabConfig& config, const std::vector<Reference>& refs, double omega, double zeta,
                      std::uint64_t seed, int threads = 1);

/// Candidate initial state from one lab snapshot (row of lab_states) and the output at that step.
Vec candidate_state(JointModelKind kind, const Vec& lab_state, const Vec& output);
/// Test suite for a candidate; states filled per step for sliding windows.
TestSuite candidate_suite(JointModelKind kind, const LabSuite& lab);

// ---- input constraints ------------------------------------------------------

struct DynamicsSample {
  Mat mass;    // M(q)
  Vec bias;    // c(q, qd) + g(q)
};

using DynamicsSampler = std::function<DynamicsSample(std::mt19937_64&)>;

/// Diagonal mass with relative variation and bounded bias, one entry per joint.
DynamicsSampler surrogate_sampler(const Vec& mass, double mass_variation, const Vec& bias_max);

/**
 * Largest symmetric boxes U_p = [-u, u] (maximal sum of u, capped at u_cap) such that
 * |M u + bias| <= tau_max for every sampled configuration and every vertex of U_p.
 * Throws InfeasibleError when the bias alone exceeds a torque limit.
 */
Vec fit_input_interval(const Vec& tau_max, const DynamicsSampler& sampler, Index samples, std::uint64_t seed,
                       double u_cap = kInf);

/// Default per-axis U_p half widths and the U_ref half width of the case study.
Vec default_input_limits();
constexpr double kReferenceAccLimit = 3.0;

// ---- synthesis templates ----------------------------------------------------

/// u = -omega^2 y1 - 2 zeta omega y2; z = plant output; constraint channel u.
ControllerTemplate state_feedback_template(const Vec& lower, const Vec& upper, const Vec& start);

/// Observer (h1t, h2t) on the position output feeding fixed gains; z = velocity - qd_hat.
ControllerTemplate observer_a1_template(double dt, double omega, double zeta, double eps, const Vec& lower,
                                        const Vec& upper, const Vec& start);

/// (omega, zeta, h1t, h2t); z = [q_hat, qd_hat]; constraint channel u.
ControllerTemplate output_feedback_template(double dt, double eps, const Vec& lower, const Vec& upper,
                                            const Vec& start);

struct ObserverA2Config {
  double dt = 0.004;
  double eps = 0.01;
  double v_half = 1.7453292519943295e-5;  // 1 millidegree
  double x0_half = 0.1;
  double ys_half = 0.005;                 // bound on qd_hat
  Vec lower = (Vec(2) << 1.0, 1.0).finished();
  Vec upper = (Vec(2) << 60.0, 300.0).finished();
  Vec start = (Vec(2) << 15.0, 30.0).finished();
  Index budget = 300;
  Index starts = 4;
  std::uint64_t seed = 0;
};

/// Observer error system driven by the measurement error, for transient-time synthesis.
ObserverTransientProblem observer_a2_problem(const ObserverA2Config& config);

}  // namespace reachsynth
