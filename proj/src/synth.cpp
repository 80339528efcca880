#include "reachsynth/synth.hpp"

#include <algorithm>
#include <cmath>

namespace reachsynth {

namespace {

Mat or_zero(const Mat& m, Index rows, Index cols) {
  if (m.size() == 0) return Mat::Zero(rows, cols);
  require_dims(m.rows() == rows && m.cols() == cols, "closed_loop: wiring block has the wrong shape");
  return m;
}

Polytope embed_constraint(const Polytope& y_c, Index z_dim, Index con_dim) {
  if (y_c.num_constraints() == 0) return y_c;
  require_dims(y_c.dim() == con_dim, "synthesis: Y_c dimension must equal the number of constraint channels");
  Mat n = Mat::Zero(y_c.num_constraints(), z_dim + con_dim);
  n.rightCols(con_dim) = y_c.normals;
  return Polytope(n, y_c.offsets);
}

Zonotope initial_set(const std::optional<Zonotope>& x0, Index n) {
  if (!x0) return Zonotope::origin(n);
  require_dims(x0->dim() == n, "synthesis: initial set dimension must equal closed-loop state dimension");
  return *x0;
}

}  // namespace

ClosedLoop closed_loop(const LtiSystem& plant, const LtiSystem& controller, const Wiring& w) {
  const Index qp = plant.outputs(), qc = controller.outputs();
  const Index mp = plant.inputs(), mc = controller.inputs();
  Interconnection ic;
  ic.external_inputs = mp;
  ic.outputs = w.z_dim + w.con_dim;
  ic.r_to_u1 = Mat::Identity(mp, mp);
  ic.y2_to_u1 = or_zero(w.plant_from_ctrl, mp, qc);
  ic.y1_to_u2 = or_zero(w.ctrl_from_plant, mc, qp);
  Mat y1z(ic.outputs, qp), y2z(ic.outputs, qc), rz(ic.outputs, mp);
  y1z << or_zero(w.z_from_plant, w.z_dim, qp), or_zero(w.con_from_plant, w.con_dim, qp);
  y2z << or_zero(w.z_from_ctrl, w.z_dim, qc), or_zero(w.con_from_ctrl, w.con_dim, qc);
  rz << Mat::Zero(w.z_dim, mp), or_zero(w.con_from_ref, w.con_dim, mp);
  ic.y1_to_z = y1z;
  ic.y2_to_z = y2z;
  ic.r_to_z = rz;
  return {interconnect(plant, controller, ic), w.z_dim, w.con_dim};
}

SynthEval evaluate_controller(const SynthesisProblem& p, const Vec& theta) {
  SynthEval ev;
  ClosedLoop cl;
  try {
    cl = closed_loop(p.plant, p.tmpl.build(theta), p.tmpl.wiring);
  } catch (const AlgebraicLoopError&) {
    return ev;
  }
  ev.built = true;
  TerminalOptions opts;
  opts.tol = p.tol;
  opts.k_max = p.k_max;
  opts.keep_set = false;
  if (p.y_c.num_constraints() > 0) opts.constraint = embed_constraint(p.y_c, cl.z_dim, cl.con_dim);
  const TerminalResult r = terminal_reach_run(cl.system, initial_set(p.x0, cl.system.states()), opts);
  ev.converged = r.converged();
  ev.converged_at = r.converged_at;
  ev.margin = opts.constraint ? r.max_margin : 0.0;
  if (!ev.converged) return ev;
  ev.z_hull = Interval(r.output_hull.lower.head(cl.z_dim), r.output_hull.upper.head(cl.z_dim));
  ev.cost = side_length_sum(ev.z_hull);
  ev.feasible = ev.margin <= p.constraint_tol;
  return ev;
}

bool verify_constraints(const SynthesisProblem& p, const Vec& theta, Index steps) {
  if (p.y_c.num_constraints() == 0) return true;
  const ClosedLoop cl = closed_loop(p.plant, p.tmpl.build(theta), p.tmpl.wiring);
  const Mat u = Mat::Zero(steps + 1, cl.system.inputs());
  const ReachSequence seq = reach_horizon(cl.system, initial_set(p.x0, cl.system.states()), u, steps);
  Mat select = Mat::Zero(cl.con_dim, cl.z_dim + cl.con_dim);
  select.rightCols(cl.con_dim).setIdentity();
  for (const Zonotope& r : seq.sets) {
    if (!zonotope_in_polytope(linear_map(select, r), p.y_c, p.constraint_tol)) return false;
  }
  return true;
}

namespace {

DfoEval to_dfo(const SynthEval& ev) {
  if (!ev.built) return {1e12, false, 1e3};
  if (!ev.converged) return {1e9, false, 1.0};
  return {ev.cost, ev.feasible, std::max(ev.margin, 0.0)};
}

SynthResult finish(const SynthesisProblem& p, const DfoResult& best, const Vec& theta) {
  const SynthEval ev = evaluate_controller(p, theta);
  SynthResult r;
  r.theta = theta;
  r.cost = ev.cost;
  r.converged_at = ev.converged_at;
  r.max_margin = ev.margin;
  r.evaluations = best.evaluations;
  r.z_hull = ev.z_hull;
  r.verified = ev.feasible && verify_constraints(p, theta, ev.converged_at + 1);
  return r;
}

}  // namespace

SynthResult synth_controller(const SynthesisProblem& p) {
  const ControllerTemplate& t = p.tmpl;
  DfoProblem dp;
  dp.lower = t.lower;
  dp.upper = t.upper;
  dp.start = t.start.size() ? t.start : Vec(0.5 * (t.lower + t.upper));
  dp.budget = p.budget;
  dp.objective = [&](const Vec& theta) { return to_dfo(evaluate_controller(p, theta)); };
  DfoOptions opts;
  opts.starts = p.starts;
  opts.seed = p.seed;
  const DfoResult best = minimize_dfo(dp, opts);
  return finish(p, best, best.x);
}

IdentifiedSynthesis synth_with_identification(const SynthesisProblem& p, const TestSuite& suite,
                                              const DeviationOptions& dev, const IdentOptions& ident) {
  IdentifiedSynthesis out;
  if (p.plant_entries.empty()) {
    out.ident = identify_uncertainty(p.plant, suite, dev, ident);
    SynthesisProblem q = p;
    q.plant = out.ident.model;
    out.synth = synth_controller(q);
    out.plant = q.plant;
    return out;
  }

  // Joint search over controller parameters and plant entries.
  const Index nc = p.tmpl.lower.size();
  const Index ne = static_cast<Index>(p.plant_entries.size());
  IdentOptions quiet = ident;
  quiet.self_check = false;
  auto plant_for = [&](const Vec& e, const IdentOptions& o) {
    LtiSystem s = apply_entries(p.plant, p.plant_entries, e);
    if (!s.is_discrete()) s = discretize(s, suite.sample_time);
    return identify_uncertainty(s, suite, dev, o);
  };
  DfoProblem dp;
  dp.lower.resize(nc + ne);
  dp.upper.resize(nc + ne);
  dp.start.resize(nc + ne);
  dp.lower.head(nc) = p.tmpl.lower;
  dp.upper.head(nc) = p.tmpl.upper;
  dp.start.head(nc) = p.tmpl.start.size() ? p.tmpl.start : Vec(0.5 * (p.tmpl.lower + p.tmpl.upper));
  for (Index i = 0; i < ne; ++i) {
    dp.lower[nc + i] = p.plant_entries[i].lower;
    dp.upper[nc + i] = p.plant_entries[i].upper;
    dp.start[nc + i] = 0.5 * (p.plant_entries[i].lower + p.plant_entries[i].upper);
  }
  dp.budget = p.budget;
  dp.objective = [&](const Vec& x) -> DfoEval {
    SynthesisProblem q = p;
    try {
      q.plant = plant_for(x.tail(ne), quiet).model;
    } catch (const std::runtime_error&) {
      return {1e12, false, 1e3};
    }
    return to_dfo(evaluate_controller(q, x.head(nc)));
  };
  DfoOptions opts;
  opts.starts = p.starts;
  opts.seed = p.seed;
  const DfoResult best = minimize_dfo(dp, opts);
  out.ident = plant_for(best.x.tail(ne), ident);
  SynthesisProblem q = p;
  q.plant = out.ident.model;
  out.synth = finish(q, best, best.x.head(nc));
  out.plant = q.plant;
  return out;
}

const char* to_string(IterationVerdict v) {
  switch (v) {
    case IterationVerdict::converged: return "converged";
    case IterationVerdict::infeasible: return "infeasible";
    case IterationVerdict::iteration_limit: return "iteration_limit";
  }
  return "unknown";
}

IterativeResult iterative_synthesis(const SynthesisProblem& p, const TestSuite& initial_suite,
                                    const PlantRunner& plant_runner, const DeviationOptions& dev,
                                    const IdentOptions& ident, const IterativeOptions& options) {
  IterativeResult out;
  TestSuite data = initial_suite;
  double first_cost = -1.0;
  for (Index it = 1; it <= options.max_iters; ++it) {
    IterationRow row;
    row.iteration = it;
    IdentifiedSynthesis step;
    try {
      step = synth_with_identification(p, data, dev, ident);
    } catch (const CoverageError& e) {
      row.status = std::string("infeasible: ") + e.what();
    } catch (const InfeasibleError& e) {
      row.status = std::string("infeasible: ") + e.what();
    } catch (const BudgetExhaustedError& e) {
      row.status = std::string("infeasible: ") + e.what();
    }
    if (!row.status.empty()) {
      out.rows.push_back(row);
      out.verdict = IterationVerdict::infeasible;
      return out;
    }
    row.synthesized = true;
    row.cost = step.synth.cost;
    row.theta = step.synth.theta;
    row.ident_cost = step.ident.cost;
    row.alpha_w = step.ident.alpha_w;
    row.alpha_v = step.ident.alpha_v;
    if (first_cost < 0.0) first_cost = step.ident.cost;
    if (it > 1 && step.ident.cost > options.infeasible_factor * first_cost) {
      row.status = "infeasible: identified disturbances grew beyond the first-iteration bound";
      out.rows.push_back(row);
      out.verdict = IterationVerdict::infeasible;
      return out;
    }

    const TestSuite fresh = plant_runner(step.synth.theta);
    ++out.plant_runs;
    const ConformanceReport conf = check_conformance(step.plant, fresh, dev.k_end, dev);
    row.conformant = conf.pass;
    row.margin = conf.max_margin;
    out.final = step;
    if (conf.pass) {
      row.status = "converged";
      out.rows.push_back(row);
      out.verdict = IterationVerdict::converged;
      return out;
    }
    row.status = "not conformant";
    out.rows.push_back(row);
    data.cases.insert(data.cases.end(), fresh.cases.begin(), fresh.cases.end());
  }
  out.verdict = IterationVerdict::iteration_limit;
  return out;
}

// ---- observer transient -----------------------------------------------------

TransientEval evaluate_transient(const ObserverTransientProblem& p, const Vec& theta) {
  const LtiSystem sys = p.build(theta);
  TerminalOptions opts;
  opts.tol = p.tol;
  opts.k_max = p.k_max;
  opts.keep_set = false;
  opts.constraint = p.y_s;
  const TerminalResult r = terminal_reach_run(sys, p.x0, opts);
  TransientEval ev;
  ev.converged = r.converged();
  if (!ev.converged) return ev;
  ev.converged_at = r.converged_at;
  ev.t_inf = static_cast<double>(r.converged_at) * *sys.sample_time;
  ev.margin = r.final_margin;
  ev.feasible = ev.margin <= kContainmentTol;
  ev.terminal_hull = r.output_hull;
  return ev;
}

TransientResult observer_transient_synthesis(const ObserverTransientProblem& p) {
  DfoProblem dp;
  dp.lower = p.lower;
  dp.upper = p.upper;
  dp.start = p.start.size() ? p.start : Vec(0.5 * (p.lower + p.upper));
  dp.budget = p.budget;
  dp.objective = [&](const Vec& theta) -> DfoEval {
    const TransientEval ev = evaluate_transient(p, theta);
    if (!ev.converged) return {1e3, false, 1.0};
    // The step count is piecewise constant; the spectral radius (< 1) breaks ties
    // within a step toward faster decay so the simplex keeps moving on plateaus.
    const LtiSystem sys = p.build(theta);
    const double dt = *sys.sample_time;
    return {ev.t_inf + dt * spectral_radius(sys.A), ev.feasible, std::max(ev.margin, 0.0)};
  };
  DfoOptions opts;
  opts.starts = p.starts;
  opts.seed = p.seed;
  const DfoResult best = minimize_dfo(dp, opts);
  const TransientEval ev = evaluate_transient(p, best.x);
  TransientResult r;
  r.theta = best.x;
  r.t_inf = ev.t_inf;
  r.converged_at = ev.converged_at;
  r.terminal_hull = ev.terminal_hull;
  r.evaluations = best.evaluations;
  return r;
}

bool input_split_valid(const Interval& u_ref, const Interval& y_c, const Interval& u_p, double tol) {
  require_dims(u_ref.dim() == y_c.dim() && y_c.dim() == u_p.dim(), "input_split_valid: dimension mismatch");
  return u_p.contains(Interval(u_ref.lower + y_c.lower, u_ref.upper + y_c.upper), tol);
}

}  // namespace reachsynth
