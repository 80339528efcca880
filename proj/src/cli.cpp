#include "reachsynth/cli.hpp"

#include "reachsynth/io.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <random>
#include <sstream>

namespace reachsynth {

namespace fs = std::filesystem;

namespace {

struct Common {
  std::string config;
  std::string out = "out";
  std::uint64_t seed = 0;
  int threads = 1;
  Json file = Json::object();  // parsed --config, empty if none

  const Json& section(const char* name) const {
    static const Json empty = Json::object();
    return file.contains(name) ? file.at(name) : empty;
  }
};

// Config-file value for `key` unless the flag was given on the command line.
template <class T>
void merge(const CLI::Option* flag, const Json& section, const char* key, T& value) {
  if (flag && flag->count() > 0) return;
  if (!section.contains(key)) return;
  try {
    value = section.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

void merge_vec(const CLI::Option* flag, const Json& section, const char* key, std::vector<double>& value) {
  merge(flag, section, key, value);
}

Vec to_vec(const std::vector<double>& v) { return Eigen::Map<const Vec>(v.data(), static_cast<Index>(v.size())); }

std::vector<JointModelKind> parse_candidates(const std::string& list) {
  std::vector<JointModelKind> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(parse_kind(item));
  if (out.empty()) throw ConfigError("no model candidate given");
  return out;
}

Json theta_json(const std::vector<std::string>& names, const Vec& theta) {
  Json j = Json::object();
  for (Index i = 0; i < theta.size(); ++i)
    j[i < static_cast<Index>(names.size()) ? names[static_cast<std::size_t>(i)] : "p" + std::to_string(i)] =
        number(theta(i));
  return j;
}

Json ident_json(const IdentResult& r) {
  Json j;
  j["cost"] = number(r.cost);
  j["c_W"] = to_json(r.c_w);
  j["c_V"] = to_json(r.c_v);
  j["alpha_W"] = to_json(r.alpha_w);
  j["alpha_V"] = to_json(r.alpha_v);
  j["output_cost"] = to_json(r.output_cost);
  j["conformant"] = r.conformant;
  j["max_margin"] = number(r.max_margin);
  j["windows"] = r.windows;
  return j;
}

void write_resolved(const Common& c, const char* command, const Json& settings) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["out"] = c.out;
  for (const auto& [k, v] : settings.items()) j[k] = v;
  write_json_file(fs::path(c.out) / "resolved-config.json", j);
}

LabConfig lab_of(const Common& c) { return lab_config_from_json(c.section("lab")); }
ReferenceConfig refs_of(const Common& c) { return reference_config_from_json(c.section("references")); }

DeviationOptions deviation_options(Index k_end, Index stride, bool windows, int threads) {
  if (k_end < 0) throw ConfigError("k_end must be non-negative");
  if (stride < 1) throw ConfigError("window stride must be positive");
  DeviationOptions d;
  d.k_end = k_end;
  d.sliding_windows = windows;
  d.window_stride = stride;
  d.threads = threads;
  return d;
}

// ---- simulate ---------------------------------------------------------------

struct SimulateCmd {
  Index axes = 1;
  double duration = 5.0;
  Index refs = 10;
  double omega = 20.0, zeta = 0.65;
  CLI::Option *o_axes = nullptr, *o_duration = nullptr, *o_refs = nullptr, *o_omega = nullptr, *o_zeta = nullptr;

  void add(CLI::App* app) {
    o_axes = app->add_option("--axes", axes, "Number of joints to simulate");
    o_duration = app->add_option("--duration", duration, "Seconds per reference trajectory");
    o_refs = app->add_option("--refs", refs, "Reference trajectories per joint");
    o_omega = app->add_option("--omega", omega, "Controller natural frequency");
    o_zeta = app->add_option("--zeta", zeta, "Controller damping");
  }

  int run(const Common& c) {
    const LabConfig lab = lab_of(c);
    ReferenceConfig rc = refs_of(c);
    if (o_omega->count() == 0) omega = lab.omega;
    if (o_zeta->count() == 0) zeta = lab.zeta;
    if (o_duration->count() == 0) duration = rc.duration;
    if (o_refs->count() == 0) refs = rc.count;
    const Json& s = c.section("simulate");
    merge(o_axes, s, "axes", axes);
    merge(o_duration, s, "duration", duration);
    merge(o_refs, s, "refs", refs);
    merge(o_omega, s, "omega", omega);
    merge(o_zeta, s, "zeta", zeta);
    if (axes < 1) throw ConfigError("--axes must be at least 1");
    if (duration < 0.0) throw ConfigError("--duration must be non-negative");
    rc.duration = duration;
    rc.count = refs;

    write_resolved(c, "simulate",
                   Json{{"lab", to_json(lab)},
                        {"references", to_json(rc)},
                        {"simulate", Json{{"axes", axes}, {"duration", duration}, {"refs", refs}, {"omega", omega},
                                          {"zeta", zeta}}}});
    std::mt19937_64 rng(c.seed);
    Json axes_json = Json::array();
    for (Index a = 0; a < axes; ++a) {
      const std::uint64_t ref_seed = rng(), lab_seed = rng();
      const auto references = duration > 0.0 ? gen_references(ref_seed, rc) : std::vector<Reference>{};
      const LabSuite suite = simulate_lab(lab, references, omega, zeta, lab_seed, c.threads);
      const std::string dir = "axis_" + std::to_string(a + 1);
      write_lab_suite(fs::path(c.out) / dir, suite);
      axes_json.push_back(Json{{"suite", dir},
                               {"cases", suite.cases.size()},
                               {"steps", suite.total_steps()},
                               {"stopped", suite.stopped_cases()}});
    }
    write_json_file(fs::path(c.out) / "simulate-report.json",
                    Json{{"schema_version", kSchemaVersion}, {"axes", axes_json}});
    return kExitOk;
  }
};

// ---- identify / check -------------------------------------------------------

struct SuiteSelection {
  std::string suite, model, candidates = "RODd";
  Index k_end = 50, stride = 1;
  bool windows = true;
  CLI::Option *o_suite = nullptr, *o_model = nullptr, *o_candidates = nullptr, *o_k_end = nullptr,
              *o_stride = nullptr, *o_windows = nullptr;

  void add(CLI::App* app, const char* candidate_flag) {
    o_suite = app->add_option("--suite", suite, "Suite directory");
    o_model = app->add_option("--model", model, "Model JSON (generic suites)");
    o_candidates = app->add_option(candidate_flag, candidates, "Model candidates for lab suites, e.g. Rd,RDd,RODd");
    o_k_end = app->add_option("--k-end", k_end, "Deviation horizon in steps");
    o_stride = app->add_option("--stride", stride, "Sliding-window stride");
    o_windows = app->add_option("--windows", windows, "Expand each recorded state into a test case");
  }

  void merge_from(const Json& s, const char* candidate_key) {
    merge(o_suite, s, "suite", suite);
    merge(o_model, s, "model", model);
    merge(o_candidates, s, candidate_key, candidates);
    merge(o_k_end, s, "k_end", k_end);
    merge(o_stride, s, "stride", stride);
    merge(o_windows, s, "windows", windows);
    if (suite.empty()) throw ConfigError("--suite is required");
  }

  Json settings() const {
    return Json{{"suite", suite}, {"model", model}, {"candidates", candidates}, {"k_end", k_end},
                {"stride", stride}, {"windows", windows}};
  }

  // (label, model, suite) triples to process.
  struct Item {
    std::string label;
    LtiSystem model;
    TestSuite suite;
  };

  std::vector<Item> items() const {
    std::vector<Item> out;
    if (suite_kind(suite) == "lab") {
      const LabSuite lab = read_lab_suite(suite);
      CandidateParams p;
      p.dt = lab.dt;
      if (!model.empty()) {
        const auto kinds = parse_candidates(candidates);
        if (kinds.size() != 1) throw ConfigError("--model with a lab suite needs exactly one candidate kind");
        out.push_back({to_string(kinds[0]), model_from_json(read_json_file(model)), candidate_suite(kinds[0], lab)});
        return out;
      }
      for (JointModelKind k : parse_candidates(candidates))
        out.push_back({to_string(k), build_candidate_discrete(k, p), candidate_suite(k, lab)});
    } else {
      if (model.empty()) throw ConfigError("--model is required for generic suites");
      LtiSystem m = model_from_json(read_json_file(model));
      TestSuite s = read_suite(suite);
      if (!m.is_discrete()) m = discretize(m, s.sample_time);
      out.push_back({fs::path(model).stem().string(), m, std::move(s)});
    }
    return out;
  }
};

struct IdentifyCmd {
  SuiteSelection sel;

  void add(CLI::App* app) { sel.add(app, "--candidates"); }

  int run(const Common& c) {
    sel.merge_from(c.section("identify"), "candidates");
    write_resolved(c, "identify", Json{{"identify", sel.settings()}});
    const auto items = sel.items();
    Json rows = Json::array();
    for (const auto& it : items) {
      const bool windows = sel.windows && !it.suite.cases.empty() && it.suite.cases[0].states.rows() > 0;
      const DeviationOptions dev = deviation_options(sel.k_end, sel.stride, windows, c.threads);
      const DeviationData data = build_deviation_data(it.model, it.suite, dev);
      const CoverageReport cov = coverage_check(it.model, data);
      if (!cov.covered)
        throw CoverageError(it.label + ": deviations at step " + std::to_string(cov.flagged_steps.front()) +
                                " are outside the span of the disturbance channels",
                            cov.flagged_steps.front());
      const IdentResult r = identify_uncertainty(it.model, data);
      Json row{{"candidate", it.label}};
      row.update(ident_json(r));
      rows.push_back(row);
      write_json_file(fs::path(c.out) / ("model_" + it.label + ".json"), model_to_json(r.model));
    }
    Json report{{"schema_version", kSchemaVersion}, {"k_end", sel.k_end}, {"stride", sel.stride}, {"rows", rows}};
    write_json_file(fs::path(c.out) / "ident-report.json", report);
    return kExitOk;
  }
};

struct CheckCmd {
  SuiteSelection sel;

  void add(CLI::App* app) { sel.add(app, "--candidate"); }

  int run(const Common& c) {
    sel.merge_from(c.section("check"), "candidate");
    if (sel.model.empty()) throw ConfigError("--model is required");
    write_resolved(c, "check", Json{{"check", sel.settings()}});
    Json rows = Json::array();
    for (const auto& it : sel.items()) {
      const bool windows = sel.windows && !it.suite.cases.empty() && it.suite.cases[0].states.rows() > 0;
      const ConformanceReport r =
          check_conformance(it.model, it.suite, sel.k_end, deviation_options(sel.k_end, sel.stride, windows, c.threads));
      Json viol = Json::array();
      for (const auto& v : r.violations)
        viol.push_back(Json{{"case", v.case_index}, {"window_start", v.window_start}, {"step", v.step},
                            {"margin", number(v.margin)}});
      rows.push_back(Json{{"model", it.label},
                          {"pass", r.pass},
                          {"max_margin", number(r.max_margin)},
                          {"windows", r.windows},
                          {"points_checked", r.points_checked},
                          {"violations", viol}});
    }
    write_json_file(fs::path(c.out) / "check-report.json",
                    Json{{"schema_version", kSchemaVersion}, {"k_end", sel.k_end}, {"rows", rows}});
    return kExitOk;
  }
};

// ---- synth ------------------------------------------------------------------

struct SynthCmd {
  std::string mode = "state-feedback";
  std::string candidate;
  std::string suite;
  Index iterations = 3, k_end = 50, stride = 1, budget = 150, starts = 2, k_max = 1000, validation_refs = -1;
  double input_limit = 20.0;
  std::vector<double> lower, upper, start;
  CLI::Option *o_mode = nullptr, *o_candidate = nullptr, *o_suite = nullptr, *o_iterations = nullptr,
              *o_k_end = nullptr, *o_stride = nullptr, *o_budget = nullptr, *o_starts = nullptr, *o_k_max = nullptr,
              *o_validation = nullptr, *o_input_limit = nullptr, *o_lower = nullptr, *o_upper = nullptr,
              *o_start = nullptr;

  void add(CLI::App* app) {
    o_mode = app->add_option("mode", mode, "state-feedback | observer-a1 | observer-a2 | output-feedback");
    o_candidate = app->add_option("--candidate", candidate, "Plant model candidate");
    o_suite = app->add_option("--suite", suite, "Initial lab suite (simulated from the lab config if omitted)");
    o_iterations = app->add_option("--iterations", iterations, "Maximum synthesis iterations");
    o_k_end = app->add_option("--k-end", k_end, "Identification horizon in steps");
    o_stride = app->add_option("--stride", stride, "Sliding-window stride");
    o_budget = app->add_option("--budget", budget, "Objective evaluations per optimizer start");
    o_starts = app->add_option("--starts", starts, "Optimizer starts");
    o_k_max = app->add_option("--k-max", k_max, "Step limit of the terminal-set iteration");
    o_validation = app->add_option("--validation-refs", validation_refs, "References per fresh plant run");
    o_input_limit = app->add_option("--input-limit", input_limit, "Half width of the joint input box U_p");
    o_lower = app->add_option("--lower", lower, "Parameter lower bounds")->delimiter(',');
    o_upper = app->add_option("--upper", upper, "Parameter upper bounds")->delimiter(',');
    o_start = app->add_option("--start", start, "Optimizer start point")->delimiter(',');
  }

  int run(const Common& c) {
    const Json& s = c.section("synth");
    merge(o_mode, s, "mode", mode);
    merge(o_candidate, s, "candidate", candidate);
    merge(o_suite, s, "suite", suite);
    merge(o_iterations, s, "iterations", iterations);
    merge(o_k_end, s, "k_end", k_end);
    merge(o_stride, s, "stride", stride);
    merge(o_budget, s, "budget", budget);
    merge(o_starts, s, "starts", starts);
    merge(o_k_max, s, "k_max", k_max);
    merge(o_validation, s, "validation_refs", validation_refs);
    merge(o_input_limit, s, "input_limit", input_limit);
    merge_vec(o_lower, s, "lower", lower);
    merge_vec(o_upper, s, "upper", upper);
    merge_vec(o_start, s, "start", start);
    if (mode == "observer-a2") return run_observer_a2(c);
    if (mode != "state-feedback" && mode != "observer-a1" && mode != "output-feedback")
      throw ConfigError("unknown synthesis mode '" + mode + "'");
    return run_iterative(c);
  }

  void defaults(const std::vector<double>& lo, const std::vector<double>& hi, const std::vector<double>& st) {
    if (lower.empty()) lower = lo;
    if (upper.empty()) upper = hi;
    if (start.empty()) start = st;
    if (lower.size() != lo.size() || upper.size() != lo.size() || start.size() != lo.size())
      throw ConfigError("mode " + mode + " takes " + std::to_string(lo.size()) + " parameters");
  }

  int run_observer_a2(const Common& c) {
    ObserverA2Config cfg;
    const LabConfig lab = lab_of(c);
    cfg.dt = lab.dt;
    cfg.eps = lab.observer.eps;
    const Json& a2 = c.section("synth").contains("observer_a2") ? c.section("synth").at("observer_a2") : Json::object();
    merge(nullptr, a2, "eps", cfg.eps);
    merge(nullptr, a2, "v_half", cfg.v_half);
    merge(nullptr, a2, "x0_half", cfg.x0_half);
    merge(nullptr, a2, "ys_half", cfg.ys_half);
    const Json& s = c.section("synth");
    if (o_budget->count() > 0 || s.contains("budget")) cfg.budget = budget;
    if (o_starts->count() > 0 || s.contains("starts")) cfg.starts = starts;
    defaults({cfg.lower(0), cfg.lower(1)}, {cfg.upper(0), cfg.upper(1)}, {cfg.start(0), cfg.start(1)});
    cfg.lower = to_vec(lower);
    cfg.upper = to_vec(upper);
    cfg.start = to_vec(start);
    cfg.seed = c.seed;
    write_resolved(c, "synth",
                   Json{{"lab", to_json(lab)},
                        {"synth", Json{{"mode", mode},
                                       {"observer_a2", Json{{"dt", cfg.dt}, {"eps", cfg.eps}, {"v_half", cfg.v_half},
                                                            {"x0_half", cfg.x0_half}, {"ys_half", cfg.ys_half}}},
                                       {"budget", cfg.budget}, {"starts", cfg.starts}, {"lower", lower},
                                       {"upper", upper}, {"start", start}}}});
    const TransientResult r = observer_transient_synthesis(observer_a2_problem(cfg));
    Json report;
    report["schema_version"] = kSchemaVersion;
    report["mode"] = mode;
    report["verdict"] = "converged";
    report["theta"] = theta_json({"h1t", "h2t"}, r.theta);
    report["t_inf"] = number(r.t_inf);
    report["converged_at"] = r.converged_at;
    report["terminal_hull"] = to_json(r.terminal_hull);
    report["evaluations"] = r.evaluations;
    write_json_file(fs::path(c.out) / "synth-report.json", report);
    return kExitOk;
  }

  int run_iterative(const Common& c) {
    LabConfig lab = lab_of(c);
    ReferenceConfig rc = refs_of(c);
    if (candidate.empty()) candidate = mode == "state-feedback" ? "RODd" : "RDd";
    const JointModelKind kind = parse_kind(candidate);
    if (mode != "state-feedback" && has_observer(kind))
      throw ConfigError("mode " + mode + " needs a plant candidate without observer (Rc, Rd or RDd)");
    if (!(input_limit > kReferenceAccLimit)) throw ConfigError("input limit must exceed the reference bound");

    ControllerTemplate tmpl;
    if (mode == "state-feedback") {
      defaults({1.0, 0.1}, {100.0, 1.0}, {lab.omega, lab.zeta});
      tmpl = state_feedback_template(to_vec(lower), to_vec(upper), to_vec(start));
    } else if (mode == "observer-a1") {
      defaults({1.0, 1.0}, {60.0, 300.0}, {lab.observer.h1t, lab.observer.h2t});
      tmpl = observer_a1_template(lab.dt, lab.omega, lab.zeta, lab.observer.eps, to_vec(lower), to_vec(upper),
                                  to_vec(start));
    } else {
      defaults({1.0, 0.1, 1.0, 1.0}, {100.0, 1.0, 60.0, 300.0},
               {lab.omega, lab.zeta, lab.observer.h1t, lab.observer.h2t});
      tmpl = output_feedback_template(lab.dt, lab.observer.eps, to_vec(lower), to_vec(upper), to_vec(start));
    }
    if (validation_refs < 0) validation_refs = rc.count;

    write_resolved(c, "synth",
                   Json{{"lab", to_json(lab)},
                        {"references", to_json(rc)},
                        {"synth", Json{{"mode", mode}, {"candidate", to_string(kind)}, {"suite", suite},
                                       {"iterations", iterations}, {"k_end", k_end}, {"stride", stride},
                                       {"budget", budget}, {"starts", starts}, {"k_max", k_max},
                                       {"validation_refs", validation_refs}, {"input_limit", input_limit},
                                       {"lower", lower}, {"upper", upper}, {"start", start}}}});

    std::mt19937_64 rng(c.seed);
    LabSuite initial;
    if (!suite.empty()) {
      initial = read_lab_suite(suite);
    } else {
      const std::uint64_t ref_seed = rng(), lab_seed = rng();
      initial = simulate_lab(lab, gen_references(ref_seed, rc), lab.omega, lab.zeta, lab_seed, c.threads);
    }
    CandidateParams cp;
    cp.dt = initial.dt;
    cp.observer = lab.observer;

    SynthesisProblem p;
    p.plant = build_candidate_discrete(kind, cp);
    p.tmpl = tmpl;
    if (tmpl.wiring.con_dim > 0)
      p.y_c = Polytope::from_interval(
          Interval::symmetric(Vec::Constant(tmpl.wiring.con_dim, input_limit - kReferenceAccLimit)));
    p.k_max = k_max;
    p.budget = budget;
    p.starts = starts;
    p.seed = c.seed;

    ReferenceConfig vc = rc;
    vc.count = validation_refs;
    const std::string m = mode;
    PlantRunner runner = [&](const Vec& th) {
      LabConfig l = lab;
      double omega = l.omega, zeta = l.zeta;
      if (m == "state-feedback") {
        omega = th(0);
        zeta = th(1);
      } else if (m == "observer-a1") {
        l.observer.h1t = th(0);
        l.observer.h2t = th(1);
      } else {
        omega = th(0);
        zeta = th(1);
        l.observer.h1t = th(2);
        l.observer.h2t = th(3);
      }
      const std::uint64_t ref_seed = rng(), lab_seed = rng();
      return candidate_suite(kind, simulate_lab(l, gen_references(ref_seed, vc), omega, zeta, lab_seed, c.threads));
    };
    const DeviationOptions dev = deviation_options(k_end, stride, true, c.threads);
    IterativeOptions io;
    io.max_iters = iterations;
    const IterativeResult r = iterative_synthesis(p, candidate_suite(kind, initial), runner, dev, {}, io);

    Json rows = Json::array();
    for (const auto& row : r.rows) {
      Json j;
      j["iteration"] = row.iteration;
      j["synthesized"] = row.synthesized;
      j["cost"] = number(row.cost);
      j["theta"] = theta_json(tmpl.names, row.theta);
      j["ident_cost"] = number(row.ident_cost);
      j["alpha_W"] = to_json(row.alpha_w);
      j["alpha_V"] = to_json(row.alpha_v);
      j["conformant"] = row.conformant;
      j["margin"] = number(row.margin);
      j["status"] = row.status;
      rows.push_back(j);
    }
    Json report;
    report["schema_version"] = kSchemaVersion;
    report["mode"] = mode;
    report["candidate"] = to_string(kind);
    report["parameters"] = tmpl.names;
    report["verdict"] = to_string(r.verdict);
    report["plant_runs"] = r.plant_runs;
    report["rows"] = rows;
    if (r.final) {
      report["final"] = Json{{"theta", theta_json(tmpl.names, r.final->synth.theta)},
                             {"cost", number(r.final->synth.cost)},
                             {"converged_at", r.final->synth.converged_at},
                             {"max_margin", number(r.final->synth.max_margin)},
                             {"z_hull", to_json(r.final->synth.z_hull)}};
      write_json_file(fs::path(c.out) / "synth-model.json", model_to_json(r.final->plant));
    }
    write_json_file(fs::path(c.out) / "synth-report.json", report);
    switch (r.verdict) {
      case IterationVerdict::converged:
        return kExitOk;
      case IterationVerdict::infeasible:
        std::cerr << "synth: infeasible verdict for " << to_string(kind) << "\n";
        return kExitInfeasible;
      case IterationVerdict::iteration_limit:
        std::cerr << "synth: no conformant controller within " << iterations << " iterations\n";
        return kExitBudget;
    }
    return kExitError;
  }
};

// ---- reach ------------------------------------------------------------------

struct ReachCmd {
  std::string model, inputs;
  std::vector<double> x0;
  Index steps = -1, k_max = 5000;
  double dt = 0.0;
  bool terminal = false;
  CLI::Option *o_model = nullptr, *o_inputs = nullptr, *o_x0 = nullptr, *o_steps = nullptr, *o_k_max = nullptr,
              *o_dt = nullptr, *o_terminal = nullptr;

  void add(CLI::App* app) {
    o_model = app->add_option("--model", model, "Model JSON");
    o_inputs = app->add_option("--inputs", inputs, "CSV with u_* columns, one row per step");
    o_x0 = app->add_option("--x0", x0, "Initial state")->delimiter(',');
    o_steps = app->add_option("--steps", steps, "Horizon k_end (default: input rows - 1)");
    o_k_max = app->add_option("--k-max", k_max, "Step limit for --terminal");
    o_dt = app->add_option("--dt", dt, "Sample time for continuous models");
    o_terminal = app->add_flag("--terminal", terminal, "Zero-input terminal set and convergence time");
  }

  int run(const Common& c) {
    const Json& s = c.section("reach");
    merge(o_model, s, "model", model);
    merge(o_inputs, s, "inputs", inputs);
    merge_vec(o_x0, s, "x0", x0);
    merge(o_steps, s, "steps", steps);
    merge(o_k_max, s, "k_max", k_max);
    merge(o_dt, s, "dt", dt);
    merge(o_terminal, s, "terminal", terminal);
    if (model.empty()) throw ConfigError("--model is required");
    write_resolved(c, "reach",
                   Json{{"reach", Json{{"model", model}, {"inputs", inputs}, {"x0", x0}, {"steps", steps},
                                       {"k_max", k_max}, {"dt", dt}, {"terminal", terminal}}}});
    LtiSystem sys = model_from_json(read_json_file(model));
    if (!sys.is_discrete()) {
      if (!(dt > 0.0)) throw ConfigError("continuous model: give --dt");
      sys = discretize(sys, dt);
    }
    Vec x = Vec::Zero(sys.states());
    if (!x0.empty()) {
      if (static_cast<Index>(x0.size()) != sys.states()) throw ConfigError("--x0 has the wrong length");
      x = to_vec(x0);
    }

    if (terminal) {
      TerminalOptions opt;
      opt.k_max = k_max;
      const TerminalResult r = terminal_reach_run(sys, Zonotope(x), opt);
      Json j;
      j["schema_version"] = kSchemaVersion;
      j["status"] = to_string(r.status);
      j["converged_at"] = r.converged_at;
      j["t_inf"] = r.converged() ? number(static_cast<double>(r.converged_at) * *sys.sample_time) : Json(nullptr);
      j["output_hull"] = to_json(r.output_hull);
      j["state_hull"] = to_json(r.state_hull);
      if (r.output_set) j["output_set"] = zonotope_to_json(*r.output_set);
      if (r.state_set) j["state_set"] = zonotope_to_json(*r.state_set);
      write_json_file(fs::path(c.out) / "terminal.json", j);
      if (r.status == TerminalStatus::diverged) return kExitInfeasible;
      if (r.status == TerminalStatus::step_limit) return kExitBudget;
      return kExitOk;
    }

    Mat u;
    if (!inputs.empty()) {
      std::vector<std::string> names;
      const Mat table = read_table_csv(inputs, &names);
      std::vector<Index> cols;
      for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i].rfind("u_", 0) == 0) cols.push_back(static_cast<Index>(i));
      if (static_cast<Index>(cols.size()) != sys.inputs())
        throw ConfigError(inputs + ": expected " + std::to_string(sys.inputs()) + " u_* columns");
      u.resize(table.rows(), sys.inputs());
      for (std::size_t i = 0; i < cols.size(); ++i) u.col(static_cast<Index>(i)) = table.col(cols[i]);
    }
    if (steps < 0) steps = u.rows() - 1;
    if (steps < 0) throw ConfigError("give --inputs or --steps");
    if (u.rows() == 0) u = Mat::Zero(steps + 1, sys.inputs());
    if (u.rows() < steps + 1) throw ConfigError("input sequence shorter than the horizon");
    const ReachSequence seq = reach_horizon(sys, Zonotope(x), u, steps);
    write_text_file(fs::path(c.out) / "reach.csv", reach_csv(seq.sets));
    return kExitOk;
  }
};

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Reachset-conformant identification and controller synthesis"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--config", common.config, "JSON configuration file");
  auto* o_seed = app.add_option("--seed", common.seed, "Random seed");
  auto* o_out = app.add_option("--out", common.out, "Output directory");
  auto* o_threads = app.add_option("--threads", common.threads, "Worker threads");

  SimulateCmd sim;
  IdentifyCmd ident;
  CheckCmd check;
  SynthCmd synth;
  ReachCmd reach;
  sim.add(app.add_subcommand("simulate", "Run the synthetic lab and write a test suite"));
  ident.add(app.add_subcommand("identify", "Identify disturbance sets of model candidates"));
  check.add(app.add_subcommand("check", "Check a model for reachset conformance on a suite"));
  synth.add(app.add_subcommand("synth", "Synthesize controller or observer parameters"));
  reach.add(app.add_subcommand("reach", "Export reachable-set tubes or the terminal set"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (!common.config.empty()) {
      if (!fs::exists(common.config)) throw ConfigError("config file not found: " + common.config);
      common.file = read_json_file(common.config);
      if (!common.file.is_object()) throw ConfigError(common.config + ": top level must be an object");
    }
    merge(o_seed, common.file, "seed", common.seed);
    merge(o_out, common.file, "out", common.out);
    merge(o_threads, common.file, "threads", common.threads);
    if (common.threads < 1) throw ConfigError("--threads must be at least 1");
    fs::create_directories(common.out);

    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "simulate") return sim.run(common);
    if (cmd == "identify") return ident.run(common);
    if (cmd == "check") return check.run(common);
    if (cmd == "synth") return synth.run(common);
    return reach.run(common);
  } catch (const CoverageError& e) {
    std::cerr << "coverage: " << e.what() << "\n";
    return kExitCoverage;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const AlgebraicLoopError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const BudgetExhaustedError& e) {
    std::cerr << "budget: " << e.what() << "\n";
    return kExitBudget;
  } catch (const ConfigError& e) {
    std::cerr << "config: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DimensionError& e) {
    std::cerr << "config: " << e.what() << "\n";
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config: " << e.what() << "\n";
    return kExitConfig;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "config: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace reachsynth
