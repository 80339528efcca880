#include "reachsynth/reach.hpp"
#include "reachsynth/lp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace reachsynth {

StepSets reach_step(const LtiSystem& sys, const Zonotope& x_k, const Vec& u_k) {
  require_dims(x_k.dim() == sys.states(), "reach_step: state set dimension");
  require_dims(u_k.size() == sys.inputs(), "reach_step: input dimension");
  Zonotope next = minkowski_sum(linear_map(sys.A, x_k), linear_map(sys.E, sys.W));
  next = translate(next, sys.B * u_k);
  Zonotope out = minkowski_sum(linear_map(sys.C, next), linear_map(sys.F, sys.V));
  out = translate(out, sys.D * u_k);
  return {std::move(next), std::move(out)};
}

std::vector<Zonotope> reach_states(const LtiSystem& sys, const Zonotope& x0, const Mat& u, Index k_end) {
  if (!sys.is_discrete()) throw std::invalid_argument("reach: system must be discrete");
  require_dims(x0.dim() == sys.states(), "reach: initial set dimension");
  require_dims(u.rows() >= k_end || sys.inputs() == 0, "reach: input sequence shorter than horizon");
  std::vector<Zonotope> xs{x0};
  const Zonotope ew = linear_map(sys.E, sys.W);
  for (Index k = 0; k < k_end; ++k) {
    const Vec uk = sys.inputs() > 0 ? Vec(u.row(k).transpose()) : Vec::Zero(0);
    xs.push_back(translate(minkowski_sum(linear_map(sys.A, xs.back()), ew), sys.B * uk));
  }
  return xs;
}

ReachSequence reach_horizon(const LtiSystem& sys, const Zonotope& x0, const Mat& u, Index k_end) {
  require_dims(u.rows() >= k_end + 1 || sys.inputs() == 0, "reach_horizon: need inputs for k = 0..k_end");
  const auto xs = reach_states(sys, x0, u, k_end);
  const Zonotope fv = linear_map(sys.F, sys.V);
  ReachSequence seq;
  seq.sample_time = *sys.sample_time;
  for (Index k = 0; k <= k_end; ++k) {
    const Vec uk = sys.inputs() > 0 ? Vec(u.row(k).transpose()) : Vec::Zero(0);
    seq.sets.push_back(translate(minkowski_sum(linear_map(sys.C, xs[k]), fv), sys.D * uk));
  }
  return seq;
}

std::vector<Zonotope> deviation_reach_sequence(const LtiSystem& sys, Index k_end) {
  require_dims(k_end >= 0, "deviation_reach: k must be non-negative");
  const Index q = sys.outputs();
  const Mat& gw = sys.W.template_generators();
  const Mat& gv = sys.V.template_generators();
  const Index pw = gw.cols(), pv = gv.cols();
  std::vector<Zonotope> out;
  Mat ae = sys.E;
  Vec center = sys.F * sys.V.center();
  Mat tmpl(q, 0);
  for (Index k = 0; k <= k_end; ++k) {
    Mat t(q, tmpl.cols() + pv);
    t << tmpl, sys.F * gv;
    Vec s(t.cols());
    for (Index i = 0; i < k; ++i) s.segment(i * pw, pw) = sys.W.scales();
    s.tail(pv) = sys.V.scales();
    out.emplace_back(center, t, s);
    // extend with Ebar_k
    const Mat ebar = sys.C * ae;
    center += ebar * sys.W.center();
    Mat grown(q, tmpl.cols() + pw);
    grown << tmpl, ebar * gw;
    tmpl = grown;
    ae = sys.A * ae;
  }
  return out;
}

Zonotope deviation_reach(const LtiSystem& sys, Index k) { return deviation_reach_sequence(sys, k).back(); }

const char* to_string(TerminalStatus status) {
  switch (status) {
    case TerminalStatus::converged: return "converged";
    case TerminalStatus::diverged: return "diverged";
    case TerminalStatus::step_limit: return "step_limit";
  }
  return "unknown";
}

TerminalResult terminal_reach_run(const LtiSystem& sys, const Zonotope& x0, const TerminalOptions& options) {
  if (!sys.is_discrete()) throw std::invalid_argument("terminal_reach: system must be discrete");
  require_dims(x0.dim() == sys.states(), "terminal_reach: initial set dimension");
  const Index n = sys.states();
  const bool monitor = options.constraint.has_value() && options.constraint->num_constraints() > 0;
  if (monitor) require_dims(options.constraint->dim() == sys.outputs(), "terminal_reach: constraint dimension");

  const Mat g_w = sys.E * sys.W.generators();
  const Vec c_w = sys.E * sys.W.center();
  const Mat g_v = sys.F * sys.V.generators();
  const Vec c_v = sys.F * sys.V.center();
  const Vec out_v = g_v.cwiseAbs().rowwise().sum();

  Mat nc, nfv_abs;
  Vec nfv_center;
  if (monitor) {
    const Polytope& p = *options.constraint;
    nc = p.normals * sys.C;
    nfv_abs = (p.normals * g_v).cwiseAbs().rowwise().sum();
    nfv_center = p.normals * c_v - p.offsets;
  }

  Vec cx = x0.center();
  Mat g0 = x0.generators();
  Mat t = g_w;  // A^k E G_W
  Vec acc_state = Vec::Zero(n);
  Vec acc_out = Vec::Zero(sys.outputs());
  Vec acc_con = monitor ? Vec::Zero(options.constraint->num_constraints()) : Vec();
  std::vector<Mat> blocks;
  Mat boxed = Mat::Zero(n, 0);
  const double start_scale = 1.0 + g0.cwiseAbs().sum() + cx.cwiseAbs().sum() + g_w.cwiseAbs().sum();

  TerminalResult res;
  auto state_delta = [&]() { return Vec(g0.cwiseAbs().rowwise().sum() + acc_state); };
  auto check_monitor = [&](Index k) {
    if (!monitor) return;
    const Vec m = nc * cx + nfv_center + (nc * g0).cwiseAbs().rowwise().sum() + acc_con + nfv_abs;
    const double worst = m.maxCoeff();
    res.max_margin = std::max(res.max_margin, worst);
    res.final_margin = worst;
    if (worst > kContainmentTol) res.last_violation = k;
  };

  Vec lo = cx - state_delta();
  Vec hi = cx + state_delta();
  Index k = 0;
  check_monitor(0);
  for (; k < options.k_max; ++k) {
    // advance X_k -> X_{k+1}
    cx = sys.A * cx + c_w;
    g0 = sys.A * g0;
    acc_state += t.cwiseAbs().rowwise().sum();
    if (sys.outputs() > 0) acc_out += (sys.C * t).cwiseAbs().rowwise().sum();
    if (monitor) acc_con += (nc * t).cwiseAbs().rowwise().sum();
    if (options.keep_set && t.cols() > 0) blocks.push_back(t);
    t = sys.A * t;
    check_monitor(k + 1);

    const Vec delta = state_delta();
    const Vec lo_next = cx - delta;
    const Vec hi_next = cx + delta;
    if (!delta.allFinite() || !cx.allFinite() || delta.sum() > options.divergence_bound * start_scale) {
      res.status = TerminalStatus::diverged;
      ++k;
      break;
    }
    const double tol = options.tol.value_or(std::max(1e-6 * delta.sum(), 1e-12));
    const bool same = n == 0 || (((lo_next - lo).cwiseAbs().array() <= tol).all() &&
                                 ((hi_next - hi).cwiseAbs().array() <= tol).all());
    lo = lo_next;
    hi = hi_next;
    if (options.keep_set && k + 1 > options.collapse_after && (k + 1) % options.collapse_every == 0) {
      Vec box = boxed.cwiseAbs().rowwise().sum();
      for (const Mat& b : blocks) box += b.cwiseAbs().rowwise().sum();
      boxed = Mat(box.asDiagonal());
      blocks.clear();
    }
    if (same) {
      res.status = TerminalStatus::converged;
      res.converged_at = k;
      ++k;
      break;
    }
  }
  res.steps = k;
  res.state_hull = Interval(lo, hi);
  const Vec out_c = sys.C * cx + c_v;
  const Vec out_d = (sys.C * g0).cwiseAbs().rowwise().sum() + acc_out + out_v;
  if (out_c.allFinite() && out_d.allFinite()) {
    res.output_hull = Interval(out_c - out_d, out_c + out_d);
  } else {
    res.output_hull = Interval(Vec::Constant(sys.outputs(), -kInf), Vec::Constant(sys.outputs(), kInf));
  }
  if (options.keep_set && res.status != TerminalStatus::diverged) {
    Index cols = g0.cols() + boxed.cols();
    for (const Mat& b : blocks) cols += b.cols();
    Mat g(n, cols);
    Index at = 0;
    g.middleCols(at, g0.cols()) = g0;
    at += g0.cols();
    g.middleCols(at, boxed.cols()) = boxed;
    at += boxed.cols();
    for (const Mat& b : blocks) {
      g.middleCols(at, b.cols()) = b;
      at += b.cols();
    }
    Zonotope xs(cx, g);
    res.output_set = minkowski_sum(linear_map(sys.C, xs), linear_map(sys.F, sys.V));
    res.state_set = std::move(xs);
  }
  return res;
}

TerminalResult terminal_reach(const LtiSystem& sys, const Zonotope& x0, const TerminalOptions& options) {
  TerminalResult r = terminal_reach_run(sys, x0, options);
  if (!r.converged()) {
    throw NonConvergenceError(std::string("terminal_reach: no convergence (") + to_string(r.status) + " after " +
                              std::to_string(r.steps) + " steps)");
  }
  return r;
}

std::string reach_csv(const std::vector<Zonotope>& sets) {
  std::ostringstream os;
  os.precision(17);
  os << "k,dim,lower,upper\n";
  for (std::size_t k = 0; k < sets.size(); ++k) {
    const Interval h = interval_hull(sets[k]);
    for (Index d = 0; d < h.dim(); ++d) {
      os << k << ',' << d + 1 << ',' << h.lower[d] << ',' << h.upper[d] << '\n';
    }
  }
  return os.str();
}

}  // namespace reachsynth
