#include "reachsynth/cli.hpp"
#include "reachsynth/conform.hpp"
#include "reachsynth/io.hpp"
#include "reachsynth/robotlab.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace reachsynth;

namespace {

py::dict ident_dict(const IdentResult& r) {
  py::dict d;
  d["cost"] = r.cost;
  d["c_w"] = r.c_w;
  d["c_v"] = r.c_v;
  d["alpha_w"] = r.alpha_w;
  d["alpha_v"] = r.alpha_v;
  d["output_cost"] = r.output_cost;
  d["conformant"] = r.conformant;
  d["max_margin"] = r.max_margin;
  d["windows"] = r.windows;
  d["model"] = r.model;
  return d;
}

DeviationOptions dev_options(Index k_end, bool sliding, Index stride, int threads) {
  DeviationOptions dev;
  dev.k_end = k_end;
  dev.sliding_windows = sliding;
  dev.window_stride = stride;
  dev.threads = threads;
  return dev;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Reachset-conformant identification and controller synthesis";

  auto base = py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
  py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_RuntimeError);
  py::register_exception<CoverageError>(m, "CoverageError", PyExc_RuntimeError);
  py::register_exception<BudgetExhaustedError>(m, "BudgetExhaustedError", PyExc_RuntimeError);
  py::register_exception<AlgebraicLoopError>(m, "AlgebraicLoopError", PyExc_RuntimeError);
  (void)base;

  // ---- sets
  py::class_<Interval>(m, "Interval")
      .def(py::init<Vec, Vec>(), py::arg("lower"), py::arg("upper"))
      .def_readonly("lower", &Interval::lower)
      .def_readonly("upper", &Interval::upper)
      .def("contains_point", &Interval::contains_point, py::arg("x"), py::arg("tol") = kContainmentTol)
      .def("__repr__", [](const Interval& i) {
        return "Interval(dim=" + std::to_string(i.dim()) + ")";
      });

  py::class_<Zonotope>(m, "Zonotope")
      .def(py::init<Vec, Mat>(), py::arg("center"), py::arg("generators"))
      .def(py::init<Vec>(), py::arg("center"))
      .def_static("box", &Zonotope::box, py::arg("half_width"))
      .def_property_readonly("center", [](const Zonotope& z) { return Vec(z.center()); })
      .def_property_readonly("generators", &Zonotope::generators)
      .def_property_readonly("dim", &Zonotope::dim)
      .def("contains_point", [](const Zonotope& z, const Vec& x, double tol) { return contains_point(z, x, tol); },
           py::arg("x"), py::arg("tol") = kContainmentTol)
      .def("interval_hull", [](const Zonotope& z) { return interval_hull(z); })
      .def("znorm", [](const Zonotope& z) { return znorm(z); })
      .def("side_length_sum", [](const Zonotope& z) { return side_length_sum(z); })
      .def("__add__", [](const Zonotope& a, const Zonotope& b) { return minkowski_sum(a, b); })
      .def("__rmatmul__", [](const Zonotope& z, const Mat& mm) { return linear_map(mm, z); });

  // ---- systems
  py::class_<LtiSystem>(m, "LtiSystem")
      .def(py::init<Mat, Mat, Mat, Mat, Mat, Mat, Zonotope, Zonotope, std::optional<double>>(), py::arg("A"),
           py::arg("B"), py::arg("C"), py::arg("D"), py::arg("E"), py::arg("F"), py::arg("W"), py::arg("V"),
           py::arg("sample_time") = std::nullopt)
      .def_readwrite("A", &LtiSystem::A)
      .def_readwrite("B", &LtiSystem::B)
      .def_readwrite("C", &LtiSystem::C)
      .def_readwrite("D", &LtiSystem::D)
      .def_readwrite("E", &LtiSystem::E)
      .def_readwrite("F", &LtiSystem::F)
      .def_readwrite("W", &LtiSystem::W)
      .def_readwrite("V", &LtiSystem::V)
      .def_readwrite("sample_time", &LtiSystem::sample_time)
      .def_property_readonly("states", &LtiSystem::states)
      .def_property_readonly("inputs", &LtiSystem::inputs)
      .def_property_readonly("outputs", &LtiSystem::outputs)
      .def("to_json", [](const LtiSystem& s) { return model_to_json(s).dump(); })
      .def_static("from_json", [](const std::string& text) { return model_from_json(Json::parse(text)); });

  m.def("discretize", &discretize, py::arg("system"), py::arg("dt"));
  m.def(
      "simulate",
      [](const LtiSystem& s, const Vec& x0, const Mat& u, const Mat& w, const Mat& v) {
        const Trajectory t = simulate(s, x0, u, w, v);
        return py::make_tuple(t.states, t.outputs);
      },
      py::arg("system"), py::arg("x0"), py::arg("u"), py::arg("w") = Mat(), py::arg("v") = Mat(),
      "Returns (states, outputs) with one row per step.");

  // ---- reachability
  m.def(
      "reach",
      [](const LtiSystem& s, const Zonotope& x0, const Mat& u, Index k_end) {
        return reach_horizon(s, x0, u, k_end).sets;
      },
      py::arg("system"), py::arg("x0"), py::arg("u"), py::arg("k_end"), "Output reachable sets R[0..k_end].");
  m.def(
      "terminal_reach",
      [](const LtiSystem& s, const Zonotope& x0, Index k_max) {
        TerminalOptions opt;
        opt.k_max = k_max;
        const TerminalResult r = terminal_reach(s, x0, opt);
        py::dict d;
        d["status"] = to_string(r.status);
        d["converged_at"] = r.converged_at;
        d["output_hull"] = r.output_hull;
        d["state_hull"] = r.state_hull;
        d["output_set"] = r.output_set;
        return d;
      },
      py::arg("system"), py::arg("x0"), py::arg("k_max") = 5000);

  // ---- data and identification
  py::class_<TestCase>(m, "TestCase")
      .def(py::init([](Mat inputs, Vec x0, Mat outputs, Mat states) {
             return TestCase{std::move(inputs), std::move(x0), std::move(outputs), std::move(states)};
           }),
           py::arg("inputs"), py::arg("initial_state"), py::arg("outputs"), py::arg("states") = Mat())
      .def_readwrite("inputs", &TestCase::inputs)
      .def_readwrite("initial_state", &TestCase::initial_state)
      .def_readwrite("outputs", &TestCase::outputs)
      .def_readwrite("states", &TestCase::states);

  py::class_<TestSuite>(m, "TestSuite")
      .def(py::init([](std::vector<TestCase> cases, double dt) { return TestSuite{std::move(cases), dt}; }),
           py::arg("cases"), py::arg("sample_time"))
      .def_readwrite("cases", &TestSuite::cases)
      .def_readwrite("sample_time", &TestSuite::sample_time)
      .def("write", [](const TestSuite& s, const std::filesystem::path& dir) { write_suite(dir, s); })
      .def_static("read", &read_suite, py::arg("dir"));

  m.def(
      "identify",
      [](const LtiSystem& s, const TestSuite& suite, Index k_end, bool sliding, Index stride, int threads) {
        return ident_dict(identify_uncertainty(s, suite, dev_options(k_end, sliding, stride, threads)));
      },
      py::arg("system"), py::arg("suite"), py::arg("k_end"), py::arg("sliding_windows") = false,
      py::arg("stride") = 1, py::arg("threads") = 1,
      "Scales and centers of W and V with the smallest tube that contains all measured deviations.");
  m.def(
      "check_conformance",
      [](const LtiSystem& s, const TestSuite& suite, Index k_end, bool sliding, int threads) {
        const ConformanceReport r = check_conformance(s, suite, k_end, dev_options(k_end, sliding, 1, threads));
        py::dict d;
        d["pass"] = r.pass;
        d["max_margin"] = r.max_margin;
        d["violations"] = r.violations.size();
        d["windows"] = r.windows;
        return d;
      },
      py::arg("system"), py::arg("suite"), py::arg("k_end"), py::arg("sliding_windows") = false,
      py::arg("threads") = 1);
  m.def(
      "coverage_check",
      [](const LtiSystem& s, const TestSuite& suite, Index k_end) {
        const CoverageReport r = coverage_check(s, build_deviation_data(s, suite, dev_options(k_end, false, 1, 1)));
        py::dict d;
        d["covered"] = r.covered;
        d["flagged_steps"] = r.flagged_steps;
        std::vector<double> residual;
        for (const auto& st : r.steps) residual.push_back(st.max_residual);
        d["max_residual"] = residual;
        return d;
      },
      py::arg("system"), py::arg("suite"), py::arg("k_end"));
  m.def("tube_cost", &tube_cost, py::arg("system"), py::arg("k_end"));

  // ---- robot joint case study
  m.def("joint_models", [] {
    std::vector<std::string> names;
    for (auto k : all_kinds()) names.emplace_back(to_string(k));
    return names;
  });
  m.def(
      "joint_model",
      [](const std::string& kind, double dt) {
        CandidateParams p;
        p.dt = dt;
        return build_candidate_discrete(parse_kind(kind), p);
      },
      py::arg("kind"), py::arg("dt") = 0.004, "Discrete candidate model (Rc, Rd, ROc, ROd, RDd, RODd).");
  m.def(
      "simulate_lab",
      [](const std::string& kind, double omega, double zeta, Index refs, double duration, std::uint64_t seed,
         int threads) {
        LabConfig lab;
        ReferenceConfig rc;
        rc.count = refs;
        rc.duration = duration;
        const LabSuite s = simulate_lab(lab, gen_references(seed, rc), omega, zeta, seed, threads);
        return candidate_suite(parse_kind(kind), s);
      },
      py::arg("kind"), py::arg("omega") = 20.0, py::arg("zeta") = 0.65, py::arg("refs") = 10,
      py::arg("duration") = 5.0, py::arg("seed") = 0, py::arg("threads") = 1,
      "Runs the synthetic lab joint and returns the test suite as seen by the given candidate.");
  m.def(
      "synthesize_observer",
      [](Index budget, std::uint64_t seed) {
        ObserverA2Config cfg;
        cfg.budget = budget;
        cfg.seed = seed;
        const TransientResult r = observer_transient_synthesis(observer_a2_problem(cfg));
        py::dict d;
        d["h1t"] = r.theta(0);
        d["h2t"] = r.theta(1);
        d["t_inf"] = r.t_inf;
        d["converged_at"] = r.converged_at;
        d["evaluations"] = r.evaluations;
        return d;
      },
      py::arg("budget") = 300, py::arg("seed") = 0, "Observer gains with the shortest transient time.");

  m.def(
      "run_cli", [](std::vector<std::string> args) {
        args.insert(args.begin(), "reachsynth");
        return run_cli(args);
      },
      py::arg("args"), "Runs one command-line invocation in-process; returns the exit code.");
}
