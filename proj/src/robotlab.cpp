#include "reachsynth/robotlab.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>
#include <thread>

namespace reachsynth {

namespace {

struct KindInfo {
  JointModelKind kind;
  const char* name;
  const char* paper_name;
};

constexpr KindInfo kKinds[] = {
    {JointModelKind::Rc, "Rc", "R-"},     {JointModelKind::Rd, "Rd", "R+"},
    {JointModelKind::ROc, "ROc", "RO-"},  {JointModelKind::ROd, "ROd", "RO+"},
    {JointModelKind::RDd, "RDd", "RD+"},  {JointModelKind::RODd, "RODd", "ROD+"},
};

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// Robot with either the position output only (observer candidates) or both states measured.
LtiSystem robot(bool full_output) {
  LtiSystem r = robot_model();
  if (full_output) {
    r.C = Mat::Identity(2, 2);
    r.D = Mat::Zero(2, 1);
    r.F = Mat::Identity(2, 2);
    r.V = Zonotope::box(Vec::Ones(2));
    r.v_labels = {"v_q", "v_qd"};
  }
  return r;
}

}  // namespace

const char* to_string(JointModelKind kind) {
  for (const auto& k : kKinds)
    if (k.kind == kind) return k.name;
  return "?";
}

JointModelKind parse_kind(const std::string& name) {
  const std::string n = lower(name);
  for (const auto& k : kKinds)
    if (n == lower(k.name) || n == lower(k.paper_name)) return k.kind;
  throw ConfigError("unknown model candidate '" + name + "'");
}

std::vector<JointModelKind> all_kinds() {
  std::vector<JointModelKind> out;
  for (const auto& k : kKinds) out.push_back(k.kind);
  return out;
}

bool has_observer(JointModelKind kind) {
  return kind == JointModelKind::ROc || kind == JointModelKind::ROd || kind == JointModelKind::RODd;
}
bool has_delay(JointModelKind kind) { return kind == JointModelKind::RDd || kind == JointModelKind::RODd; }
bool is_discrete_kind(JointModelKind kind) { return kind != JointModelKind::Rc && kind != JointModelKind::ROc; }

LtiSystem robot_model() {
  Mat a(2, 2);
  a << 0, 1, 0, 0;
  Mat b(2, 1);
  b << 0, 1;
  Mat c(1, 2);
  c << 1, 0;
  LtiSystem r(a, b, c, Mat::Zero(1, 1), Mat::Identity(2, 2), Mat::Identity(1, 1), Zonotope::box(Vec::Ones(2)),
              Zonotope::box(Vec::Ones(1)));
  r.w_labels = {"w_q", "w_qd"};
  r.v_labels = {"v_q"};
  return r;
}

LtiSystem observer_model(const ObserverGains& g) {
  if (!(g.eps > 0.0)) throw ConfigError("observer: eps must be positive");
  Mat a(2, 2);
  a << -g.h1(), 1, -g.h2(), 0;
  Mat b(2, 1);
  b << g.h1(), g.h2();
  return LtiSystem(a, b, Mat::Identity(2, 2), Mat::Zero(2, 1));
}

LtiSystem discrete_observer(const ObserverGains& gains, double dt) {
  if (!(dt > 0.0)) throw ConfigError("discrete_observer: dt must be positive");
  // Bilinear transform, realized so that the state is x_hat - gamma * m and the
  // output is the estimate itself (feedthrough of the current measurement).
  const LtiSystem c = observer_model(gains);
  const Mat I = Mat::Identity(2, 2);
  const Mat m = (I - 0.5 * dt * c.A).inverse();
  const Mat ad = m * (I + 0.5 * dt * c.A);
  const Mat gamma = 0.5 * dt * m * c.B;
  return LtiSystem(ad, (ad + I) * gamma, I, gamma, dt);
}

LtiSystem build_candidate(JointModelKind kind, const CandidateParams& p) {
  const double dt = p.dt;
  switch (kind) {
    case JointModelKind::Rc:
      return robot(true);
    case JointModelKind::Rd:
      return discretize(robot(true), dt);
    case JointModelKind::ROc:
      return series(robot(false), observer_model(p.observer));
    case JointModelKind::ROd:
      return series(discretize(robot(false), dt), discrete_observer(p.observer, dt));
    case JointModelKind::RDd:
      return series(series(unit_delay(1, dt), discretize(robot(true), dt)), unit_delay(2, dt));
    case JointModelKind::RODd:
      return series(series(series(unit_delay(1, dt), discretize(robot(false), dt)), unit_delay(1, dt)),
                    discrete_observer(p.observer, dt));
  }
  throw ConfigError("build_candidate: unknown kind");
}

LtiSystem build_candidate_discrete(JointModelKind kind, const CandidateParams& p) {
  LtiSystem s = build_candidate(kind, p);
  return s.is_discrete() ? s : discretize(s, p.dt);
}

// ---- references -------------------------------------------------------------

Reference trapezoid(double q0, double q1, double max_vel, double max_acc, double dt) {
  if (!(max_vel > 0.0) || !(max_acc > 0.0) || !(dt > 0.0)) throw ConfigError("trapezoid: limits must be positive");
  const double dist = std::abs(q1 - q0);
  const double dir = q1 >= q0 ? 1.0 : -1.0;
  Reference r;
  r.dt = dt;
  if (dist == 0.0) {
    r.samples = Mat::Zero(1, 3);
    r.samples(0, 0) = q0;
    return r;
  }
  // Accelerate for na steps, cruise nc steps, decelerate na steps; rounding to the
  // grid only lowers the acceleration and the cruise velocity.
  Index na = 0, nc = 0;
  if (dist <= max_vel * max_vel / max_acc) {
    na = std::max<Index>(1, static_cast<Index>(std::ceil(std::sqrt(dist / max_acc) / dt - 1e-9)));
  } else {
    na = std::max<Index>(1, static_cast<Index>(std::ceil(max_vel / (max_acc * dt) - 1e-9)));
    const double ta = static_cast<double>(na) * dt;
    nc = std::max<Index>(0, static_cast<Index>(std::ceil((dist / max_vel - ta) / dt - 1e-9)));
  }
  const double ta = static_cast<double>(na) * dt;
  const double tc = static_cast<double>(nc) * dt;
  const double acc = dist / (ta * (ta + tc));
  const double v = acc * ta;
  const Index n = 2 * na + nc;
  r.samples.resize(n + 1, 3);
  for (Index k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) * dt;
    double q, qd, qdd;
    if (k < na) {
      q = 0.5 * acc * t * t;
      qd = acc * t;
      qdd = acc;
    } else if (k < na + nc) {
      const double s = t - ta;
      q = 0.5 * acc * ta * ta + v * s;
      qd = v;
      qdd = 0.0;
    } else if (k < n) {
      const double s = t - ta - tc;
      q = 0.5 * acc * ta * ta + v * tc + v * s - 0.5 * acc * s * s;
      qd = v - acc * s;
      qdd = -acc;
    } else {
      q = dist;
      qd = 0.0;
      qdd = 0.0;
    }
    r.samples.row(k) << q0 + dir * q, dir * qd, dir * qdd;
  }
  return r;
}

Reference quintic(double q0, double q1, double t_total, double dt) {
  if (!(t_total > 0.0) || !(dt > 0.0)) throw ConfigError("quintic: duration must be positive");
  const Index n = std::max<Index>(1, static_cast<Index>(std::ceil(t_total / dt - 1e-9)));
  const double T = static_cast<double>(n) * dt;
  const double d = q1 - q0;
  Reference r;
  r.dt = dt;
  r.samples.resize(n + 1, 3);
  for (Index k = 0; k <= n; ++k) {
    const double s = static_cast<double>(k) / static_cast<double>(n);
    const double s2 = s * s, s3 = s2 * s;
    r.samples(k, 0) = q0 + d * (10 * s3 - 15 * s3 * s + 6 * s3 * s2);
    r.samples(k, 1) = d / T * (30 * s2 - 60 * s3 + 30 * s3 * s);
    r.samples(k, 2) = d / (T * T) * (60 * s - 180 * s2 + 120 * s3);
  }
  return r;
}

std::vector<Reference> gen_references(std::uint64_t seed, const ReferenceConfig& c) {
  std::vector<Reference> out;
  if (c.count <= 0 || !(c.duration > 0.0)) return out;
  if (!(c.dt > 0.0) || !(c.max_acc > 0.0) || !(c.max_vel > 0.0) || !(c.max_pos > 0.0))
    throw ConfigError("gen_references: limits and sample time must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Index steps = std::max<Index>(1, static_cast<Index>(std::llround(c.duration / c.dt)));
  for (Index i = 0; i < c.count; ++i) {
    std::vector<Vec> rows;
    double q = 0.0;
    while (static_cast<Index>(rows.size()) < steps) {
      double target = c.max_pos * (2.0 * unit(rng) - 1.0);
      if (std::abs(target - q) < 0.05 * c.max_pos) target = q > 0 ? q - 0.5 * c.max_pos : q + 0.5 * c.max_pos;
      const double vmax = c.max_vel * (0.3 + 0.7 * unit(rng));
      const double amax = c.max_acc * (0.3 + 0.7 * unit(rng));
      Reference seg;
      if (unit(rng) < c.trapezoid_share) {
        seg = trapezoid(q, target, vmax, amax, c.dt);
      } else {
        const double d = std::abs(target - q);
        const double T = std::max(std::sqrt(10.0 / std::sqrt(3.0) * d / amax), 1.875 * d / vmax);
        seg = quintic(q, target, T, c.dt);
      }
      for (Index k = 0; k + 1 < seg.steps(); ++k) rows.push_back(seg.samples.row(k).transpose());
      q = target;
      const Index dwell = 1 + static_cast<Index>(c.max_dwell * unit(rng) / c.dt);
      for (Index k = 0; k < dwell; ++k) rows.push_back((Vec(3) << q, 0.0, 0.0).finished());
    }
    Reference r;
    r.dt = c.dt;
    r.samples.resize(steps, 3);
    for (Index k = 0; k < steps; ++k) r.samples.row(k) = rows[static_cast<std::size_t>(k)].transpose();
    out.push_back(std::move(r));
  }
  return out;
}

// ---- lab plant --------------------------------------------------------------

Index LabSuite::stopped_cases() const {
  return std::count_if(cases.begin(), cases.end(), [](const LabCase& c) { return c.stopped; });
}

Index LabSuite::total_steps() const {
  Index n = 0;
  for (const auto& c : cases) n += c.inputs.rows();
  return n;
}

namespace {

struct LabMatrices {
  Mat ad, bd, ed;          // robot
  Mat aod, bod, cod, dod;  // observer
};

LabCase run_case(const LabConfig& cfg, const LabMatrices& m, const Reference& ref, double omega, double zeta,
                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double kp = omega * omega, kd = 2.0 * zeta * omega;
  auto quantize = [&](double q) {
    return cfg.quantization > 0.0 ? cfg.quantization * std::round(q / cfg.quantization) : q;
  };

  const Index T = ref.steps();
  LabCase out;
  out.inputs.resize(T, 1);
  out.outputs.resize(T, 2);
  out.lab_states.resize(T, kLabColumns);
  out.reference = ref.samples;

  Vec x(2);
  x << ref.samples(0, 0), 0.0;
  // Observer starts at rest on the initial measurement.
  Vec xi = (Mat::Identity(2, 2) - m.aod).fullPivLu().solve(m.bod * quantize(x(0)));
  // Delay lines hold the last delay_in commands and delay_out measurements, oldest first.
  std::vector<double> u_line(static_cast<std::size_t>(cfg.delay_in), 0.0);
  std::vector<double> m_line(static_cast<std::size_t>(cfg.delay_out), quantize(x(0)));
  double u_prev = 0.0, m_prev = quantize(x(0));
  // Disturbance value is held for a geometric number of steps.
  std::geometric_distribution<Index> hold(1.0 / std::max(1.0, cfg.w_hold_mean));
  Vec w = Vec::Zero(2);
  Index hold_left = 0;

  Index k = 0;
  for (; k < T; ++k) {
    const double meas = quantize(x(0));
    const double obs_in = m_line.empty() ? meas : m_line.front();
    const Vec xo = m.cod * xi + m.dod * obs_in;
    out.lab_states.row(k) << u_prev, x(0), x(1), m_prev, xo(0), xo(1), xi(0), xi(1);
    out.outputs.row(k) = xo.transpose();
    const double u = ref.samples(k, 2) + kp * (ref.samples(k, 0) - xo(0)) + kd * (ref.samples(k, 1) - xo(1));
    out.inputs(k, 0) = u;

    double applied = u;
    if (!u_line.empty()) {
      applied = u_line.front();
      u_line.erase(u_line.begin());
      u_line.push_back(u);
    }
    if (!m_line.empty()) {
      m_line.erase(m_line.begin());
      m_line.push_back(meas);
    }

    if (hold_left <= 0) {
      const bool vertex = unit(rng) < cfg.vertex_share;
      for (Index i = 0; i < 2; ++i) {
        const double s = vertex ? (unit(rng) < 0.5 ? -1.0 : 1.0) : 2.0 * unit(rng) - 1.0;
        w(i) = cfg.w_center(i) + cfg.w_half(i) * s;
      }
      hold_left = 1 + hold(rng);
    }
    --hold_left;
    x = m.ad * x + m.bd * applied + m.ed * w;
    xi = m.aod * xi + m.bod * obs_in;
    u_prev = u;
    m_prev = meas;

    const bool diverged = !x.allFinite() || !xi.allFinite() || std::abs(u) > cfg.stop_input ||
                          std::abs(x(0) - ref.samples(k, 0)) > cfg.stop_error;
    if (diverged) {
      out.stopped = true;
      ++k;
      break;
    }
  }
  if (k < T) {
    out.inputs.conservativeResize(k, Eigen::NoChange);
    out.outputs.conservativeResize(k, Eigen::NoChange);
    out.lab_states.conservativeResize(k, Eigen::NoChange);
    out.reference.conservativeResize(k, Eigen::NoChange);
  }
  return out;
}

}  // namespace

LabSuite simulate_lab(const LabConfig& cfg, const std::vector<Reference>& refs, double omega, double zeta,
                      std::uint64_t seed, int threads) {
  if (!(cfg.dt > 0.0)) throw ConfigError("lab: dt must be positive");
  if (cfg.delay_in < 0 || cfg.delay_out < 0) throw ConfigError("lab: delays must be non-negative");
  if (cfg.w_half.size() != 2 || cfg.w_center.size() != 2) throw ConfigError("lab: disturbance box must be 2-D");
  if ((cfg.w_half.array() < 0.0).any()) throw ConfigError("lab: disturbance half widths must be non-negative");
  if (!(cfg.w_hold_mean >= 1.0)) throw ConfigError("lab: disturbance hold time must be at least one step");
  for (const auto& r : refs)
    if (r.samples.cols() != 3 || std::abs(r.dt - cfg.dt) > 1e-12)
      throw ConfigError("lab: reference sample time or shape does not match");

  const LtiSystem rd = discretize(robot_model(), cfg.dt);
  const LtiSystem od = discrete_observer(cfg.observer, cfg.dt);
  const LabMatrices m{rd.A, rd.B, rd.E, od.A, od.B, od.C, od.D};

  LabSuite suite;
  suite.dt = cfg.dt;
  suite.cases.resize(refs.size());
  const std::size_t n = refs.size();
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(threads), n));
  auto work = [&](std::size_t t) {
    for (std::size_t i = t; i < n; i += workers)
      suite.cases[i] = run_case(cfg, m, refs[i], omega, zeta, seed * 1000003ULL + i);
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  return suite;
}

Vec candidate_state(JointModelKind kind, const Vec& s, const Vec& y) {
  require_dims(s.size() == kLabColumns && y.size() == 2, "candidate_state: lab snapshot shape");
  switch (kind) {
    case JointModelKind::Rc:
    case JointModelKind::Rd:
      return (Vec(2) << s(kQ), s(kQd)).finished();
    case JointModelKind::ROc:
      // The continuous observer state is the estimate itself.
      return (Vec(4) << s(kQ), s(kQd), s(kQHat), s(kQdHat)).finished();
    case JointModelKind::ROd:
      return (Vec(4) << s(kQ), s(kQd), s(kXi1), s(kXi2)).finished();
    case JointModelKind::RDd:
      // The delayed-output state is what the controller sees right now.
      return (Vec(5) << s(kUPrev), s(kQ), s(kQd), y(0), y(1)).finished();
    case JointModelKind::RODd:
      return (Vec(6) << s(kUPrev), s(kQ), s(kQd), s(kMPrev), s(kXi1), s(kXi2)).finished();
  }
  throw ConfigError("candidate_state: unknown kind");
}

TestSuite candidate_suite(JointModelKind kind, const LabSuite& lab) {
  TestSuite suite;
  suite.sample_time = lab.dt;
  for (const auto& c : lab.cases) {
    const Index T = c.inputs.rows();
    if (T == 0) continue;
    TestCase tc;
    tc.inputs = c.inputs;
    tc.outputs = c.outputs;
    const Index n = candidate_state(kind, c.lab_states.row(0).transpose(), c.outputs.row(0).transpose()).size();
    tc.states.resize(T, n);
    for (Index k = 0; k < T; ++k)
      tc.states.row(k) = candidate_state(kind, c.lab_states.row(k).transpose(), c.outputs.row(k).transpose());
    tc.initial_state = tc.states.row(0).transpose();
    suite.cases.push_back(std::move(tc));
  }
  return suite;
}

// ---- input constraints ------------------------------------------------------

DynamicsSampler surrogate_sampler(const Vec& mass, double mass_variation, const Vec& bias_max) {
  require_dims(mass.size() == bias_max.size(), "surrogate_sampler: one mass and bias bound per joint");
  return [mass, mass_variation, bias_max](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    DynamicsSample s;
    const Index n = mass.size();
    s.mass = Mat::Zero(n, n);
    s.bias.resize(n);
    for (Index i = 0; i < n; ++i) {
      s.mass(i, i) = mass(i) * (1.0 + mass_variation * unit(rng));
      s.bias(i) = bias_max(i) * unit(rng);
    }
    return s;
  };
}

Vec fit_input_interval(const Vec& tau_max, const DynamicsSampler& sampler, Index samples, std::uint64_t seed,
                       double u_cap) {
  if (samples <= 0) throw ConfigError("fit_input_interval: need at least one sample");
  const Index n = tau_max.size();
  std::mt19937_64 rng(seed);
  // |M u + b| <= tau over all vertices of [-u, u]  <=>  |M| u <= tau - |b| (u >= 0).
  Mat a(samples * n, n);
  Vec b(samples * n);
  for (Index s = 0; s < samples; ++s) {
    const DynamicsSample d = sampler(rng);
    require_dims(d.mass.rows() == n && d.mass.cols() == n && d.bias.size() == n,
                 "fit_input_interval: sample shape does not match tau_max");
    for (Index i = 0; i < n; ++i) {
      const double slack = tau_max(i) - std::abs(d.bias(i));
      if (slack < 0.0) throw InfeasibleError("fit_input_interval: bias torque exceeds the limit of joint " +
                                             std::to_string(i));
      a.row(s * n + i) = -d.mass.row(i).cwiseAbs();
      b(s * n + i) = -slack;
    }
  }
  LinearProgram lp(-Vec::Ones(n), a, b);
  lp.upper = Vec::Constant(n, u_cap);
  const LpSolution sol = solve_lp(lp);
  if (!sol.optimal()) throw InfeasibleError(std::string("fit_input_interval: LP ") + to_string(sol.status));
  return sol.x.cwiseMax(0.0);
}

Vec default_input_limits() { return (Vec(6) << 20.0, 7.27, 20.0, 20.0, 20.0, 20.0).finished(); }

// ---- synthesis templates ----------------------------------------------------

namespace {

void check_bounds(const Vec& lower, const Vec& upper, const Vec& start, Index n, const char* what) {
  if (lower.size() != n || upper.size() != n || (start.size() != 0 && start.size() != n))
    throw ConfigError(std::string(what) + ": expected " + std::to_string(n) + " parameter bounds");
}

Mat gain_row(double omega, double zeta) { return (Mat(1, 2) << -omega * omega, -2.0 * zeta * omega).finished(); }

}  // namespace

ControllerTemplate state_feedback_template(const Vec& lower, const Vec& upper, const Vec& start) {
  check_bounds(lower, upper, start, 2, "state_feedback_template");
  ControllerTemplate t;
  t.names = {"omega", "zeta"};
  t.lower = lower;
  t.upper = upper;
  t.start = start;
  t.build = [](const Vec& th) { return static_gain(gain_row(th(0), th(1))); };
  t.wiring.ctrl_from_plant = Mat::Identity(2, 2);
  t.wiring.plant_from_ctrl = Mat::Identity(1, 1);
  t.wiring.z_from_plant = Mat::Identity(2, 2);
  t.wiring.con_from_ctrl = Mat::Identity(1, 1);
  t.wiring.z_dim = 2;
  t.wiring.con_dim = 1;
  return t;
}

ControllerTemplate observer_a1_template(double dt, double omega, double zeta, double eps, const Vec& lower,
                                        const Vec& upper, const Vec& start) {
  check_bounds(lower, upper, start, 2, "observer_a1_template");
  ControllerTemplate t;
  t.names = {"h1t", "h2t"};
  t.lower = lower;
  t.upper = upper;
  t.start = start;
  t.build = [dt, omega, zeta, eps](const Vec& th) {
    const LtiSystem o = discrete_observer({th(0), th(1), eps}, dt);
    Mat sel(2, 2);
    sel << gain_row(omega, zeta), (Mat(1, 2) << 0.0, 1.0).finished();
    return LtiSystem(o.A, o.B, sel * o.C, sel * o.D, dt);
  };
  t.wiring.ctrl_from_plant = (Mat(1, 2) << 1.0, 0.0).finished();
  t.wiring.plant_from_ctrl = (Mat(1, 2) << 1.0, 0.0).finished();
  t.wiring.z_from_plant = (Mat(1, 2) << 0.0, 1.0).finished();
  t.wiring.z_from_ctrl = (Mat(1, 2) << 0.0, -1.0).finished();
  t.wiring.z_dim = 1;
  t.wiring.con_dim = 0;
  return t;
}

ControllerTemplate output_feedback_template(double dt, double eps, const Vec& lower, const Vec& upper,
                                            const Vec& start) {
  check_bounds(lower, upper, start, 4, "output_feedback_template");
  ControllerTemplate t;
  t.names = {"omega", "zeta", "h1t", "h2t"};
  t.lower = lower;
  t.upper = upper;
  t.start = start;
  t.build = [dt, eps](const Vec& th) {
    const LtiSystem o = discrete_observer({th(2), th(3), eps}, dt);
    Mat sel(3, 2);
    sel << gain_row(th(0), th(1)), Mat::Identity(2, 2);
    return LtiSystem(o.A, o.B, sel * o.C, sel * o.D, dt);
  };
  t.wiring.ctrl_from_plant = (Mat(1, 2) << 1.0, 0.0).finished();
  t.wiring.plant_from_ctrl = (Mat(1, 3) << 1.0, 0.0, 0.0).finished();
  t.wiring.z_from_ctrl = (Mat(2, 3) << 0, 1, 0, 0, 0, 1).finished();
  t.wiring.con_from_ctrl = (Mat(1, 3) << 1.0, 0.0, 0.0).finished();
  t.wiring.z_dim = 2;
  t.wiring.con_dim = 1;
  return t;
}

ObserverTransientProblem observer_a2_problem(const ObserverA2Config& c) {
  if (!(c.v_half >= 0.0) || !(c.x0_half >= 0.0) || !(c.ys_half > 0.0))
    throw ConfigError("observer_a2_problem: set sizes must be non-negative");
  ObserverTransientProblem p;
  const double dt = c.dt, eps = c.eps, v = c.v_half;
  p.build = [dt, eps, v](const Vec& th) {
    const LtiSystem o = discrete_observer({th(0), th(1), eps}, dt);
    // The same measurement error enters the state and, through the feedthrough, the output.
    LtiSystem s(o.A, o.B, o.C, o.D, o.B, o.D, Zonotope::box(Vec::Constant(1, v)), Zonotope::box(Vec::Constant(1, v)),
                dt);
    s.w_labels = {"v_q"};
    s.v_labels = {"v_q"};
    return s;
  };
  p.x0 = Zonotope::box(Vec::Constant(2, c.x0_half));
  Mat n(2, 2);
  n << 0, 1, 0, -1;
  p.y_s = Polytope(n, Vec::Constant(2, c.ys_half));
  p.lower = c.lower;
  p.upper = c.upper;
  p.start = c.start;
  p.budget = c.budget;
  p.starts = c.starts;
  p.seed = c.seed;
  return p;
}

}  // namespace reachsynth
