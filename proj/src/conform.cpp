#include "reachsynth/conform.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <thread>
#include <tuple>

namespace reachsynth {

// ---- DeviationData ----------------------------------------------------------

namespace {

bool origin_less(const DeviationPoint& a, const DeviationPoint& b) {
  return std::tie(a.case_index, a.window_start) < std::tie(b.case_index, b.window_start);
}

double cross(const Vec& o, const Vec& a, const Vec& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

// Convex hull vertices (monotone chain), collinear points dropped.
std::vector<DeviationPoint> hull_2d(std::vector<DeviationPoint> pts) {
  std::sort(pts.begin(), pts.end(), [](const DeviationPoint& a, const DeviationPoint& b) {
    if (a.y[0] != b.y[0]) return a.y[0] < b.y[0];
    if (a.y[1] != b.y[1]) return a.y[1] < b.y[1];
    return origin_less(a, b);
  });
  std::vector<DeviationPoint> uniq;
  for (auto& p : pts) {
    if (!uniq.empty() && uniq.back().y[0] == p.y[0] && uniq.back().y[1] == p.y[1]) continue;
    uniq.push_back(std::move(p));
  }
  if (uniq.size() <= 2) return uniq;
  std::vector<DeviationPoint> h(2 * uniq.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < uniq.size(); ++i) {
    while (k >= 2 && cross(h[k - 2].y, h[k - 1].y, uniq[i].y) <= 0) --k;
    h[k++] = uniq[i];
  }
  for (std::size_t i = uniq.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(h[k - 2].y, h[k - 1].y, uniq[i - 1].y) <= 0) --k;
    h[k++] = uniq[i - 1];
  }
  h.resize(k - 1);
  return h;
}

}  // namespace

DeviationData::DeviationData(Index k_end, Index output_dim, bool aggregate)
    : k_end_(k_end), q_(output_dim), aggregate_(aggregate), points_(k_end + 1), compacted_size_(k_end + 1, 0) {
  require_dims(k_end >= 0, "DeviationData: horizon must be non-negative");
}

void DeviationData::add(Index k, const Vec& y, Index case_index, Index window_start) {
  require_dims(k >= 0 && k <= k_end_, "DeviationData::add: step outside horizon");
  require_dims(y.size() == q_, "DeviationData::add: output dimension");
  ++samples_;
  auto& pts = points_[k];
  DeviationPoint p{y, case_index, window_start};
  if (!aggregate_ || q_ >= 3) {
    pts.push_back(std::move(p));
    return;
  }
  if (q_ == 1) {
    if (pts.empty()) {
      pts.push_back(p);
      pts.push_back(std::move(p));
      return;
    }
    const double v = y[0];
    if (v < pts[0].y[0] || (v == pts[0].y[0] && origin_less(p, pts[0]))) pts[0] = p;
    if (v > pts[1].y[0] || (v == pts[1].y[0] && origin_less(p, pts[1]))) pts[1] = std::move(p);
    return;
  }
  pts.push_back(std::move(p));
  if (pts.size() > 2 * compacted_size_[k] + 512) compact(k);
}

void DeviationData::compact(Index k) {
  if (!aggregate_ || q_ != 2) return;
  points_[k] = hull_2d(std::move(points_[k]));
  compacted_size_[k] = points_[k].size();
}

void DeviationData::merge(const DeviationData& other) {
  require_dims(other.k_end_ == k_end_ && other.q_ == q_, "DeviationData::merge: shape mismatch");
  const Index samples = samples_ + other.samples_;
  for (Index k = 0; k <= k_end_; ++k) {
    for (const auto& p : other.points_[k]) add(k, p.y, p.case_index, p.window_start);
  }
  samples_ = samples;
  windows_ += other.windows_;
}

void DeviationData::finalize() {
  for (Index k = 0; k <= k_end_; ++k) {
    if (q_ == 1 && aggregate_ && points_[k].size() == 2 && points_[k][0].y == points_[k][1].y &&
        points_[k][0].case_index == points_[k][1].case_index &&
        points_[k][0].window_start == points_[k][1].window_start) {
      points_[k].pop_back();
    }
    compact(k);
  }
}

double DeviationData::max_abs() const {
  double m = 0.0;
  for (const auto& pts : points_) {
    for (const auto& p : pts) m = std::max(m, p.y.cwiseAbs().maxCoeff());
  }
  return m;
}

DeviationData build_deviation_data(const LtiSystem& sys, const TestSuite& suite, const DeviationOptions& options) {
  if (!sys.is_discrete()) throw std::invalid_argument("build_deviation_data: system must be discrete");
  suite.validate(sys);
  require_dims(options.k_end >= 0, "build_deviation_data: k_end must be non-negative");
  const Index stride = std::max<Index>(options.window_stride, 1);

  auto process = [&](Index ci, DeviationData& out) {
    const TestCase& tc = suite.cases[ci];
    const Index steps = tc.steps();
    std::vector<Index> starts{0};
    if (options.sliding_windows && tc.states.rows() > 0) {
      for (Index s = stride; s < steps; s += stride) starts.push_back(s);
    }
    Vec x, y;
    for (Index s : starts) {
      if (s >= steps) continue;
      out.count_window();
      x = s == 0 ? tc.initial_state : Vec(tc.states.row(s).transpose());
      const Index last = std::min(options.k_end, steps - 1 - s);
      for (Index k = 0; k <= last; ++k) {
        const auto uk = tc.inputs.row(s + k).transpose();
        y = tc.outputs.row(s + k).transpose() - sys.C * x - sys.D * uk;
        out.add(k, y, ci, s);
        x = sys.A * x + sys.B * uk;
      }
    }
  };

  const Index n_cases = static_cast<Index>(suite.cases.size());
  const int threads = std::max(1, std::min<int>(options.threads, static_cast<int>(std::max<Index>(n_cases, 1))));
  DeviationData data(options.k_end, sys.outputs(), options.aggregate);
  if (threads == 1) {
    for (Index ci = 0; ci < n_cases; ++ci) process(ci, data);
  } else {
    std::vector<DeviationData> parts(threads, DeviationData(options.k_end, sys.outputs(), options.aggregate));
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        const Index lo = n_cases * t / threads;
        const Index hi = n_cases * (t + 1) / threads;
        for (Index ci = lo; ci < hi; ++ci) process(ci, parts[t]);
      });
    }
    for (auto& th : pool) th.join();
    for (auto& part : parts) {
      part.finalize();
      data.merge(part);
    }
  }
  data.finalize();
  return data;
}

// ---- conformance ------------------------------------------------------------

ConformanceReport check_conformance(const LtiSystem& sys, const DeviationData& data, const ConformanceOptions& options) {
  require_dims(data.output_dim() == sys.outputs(), "check_conformance: output dimension");
  ConformanceReport rep;
  rep.windows = data.windows();
  const auto tube = deviation_reach_sequence(sys, data.k_end());
  for (Index k = 0; k <= data.k_end(); ++k) {
    const auto& pts = data.points(k);
    if (pts.empty()) continue;
    const Polytope p = halfspace_rep(tube[k]);
    for (const auto& pt : pts) {
      ++rep.points_checked;
      const double m = p.margin(pt.y);
      rep.max_margin = std::max(rep.max_margin, m);
      if (m > options.tol) rep.violations.push_back({pt.case_index, pt.window_start, k, m});
    }
  }
  rep.pass = rep.violations.empty();
  std::stable_sort(rep.violations.begin(), rep.violations.end(),
                   [](const Violation& a, const Violation& b) { return a.margin > b.margin; });
  if (static_cast<Index>(rep.violations.size()) > options.max_reported) rep.violations.resize(options.max_reported);
  return rep;
}

ConformanceReport check_conformance(const LtiSystem& sys, const TestSuite& suite, Index k_end,
                                    const DeviationOptions& dev, const ConformanceOptions& options) {
  DeviationOptions d = dev;
  d.k_end = k_end;
  return check_conformance(sys, build_deviation_data(sys, suite, d), options);
}

// ---- identification LP ------------------------------------------------------

IdentLp build_ident_lp(const LtiSystem& sys, const DeviationData& data, const IdentOptions& options) {
  if (!sys.is_discrete()) throw std::invalid_argument("build_ident_lp: system must be discrete");
  require_dims(data.output_dim() == sys.outputs(), "build_ident_lp: output dimension");
  const Index q = sys.outputs();
  const Index k_end = data.k_end();
  const double ts = *sys.sample_time;
  const Mat& gw = sys.W.template_generators();
  const Mat& gv = sys.V.template_generators();

  IdentLp out;
  out.w = sys.w_dim();
  out.v = sys.v_dim();
  out.pw = gw.cols();
  out.pv = gv.cols();
  const Index nvar = out.w + out.v + out.pw + out.pv;
  const Index ow = 0, ov = out.w, oaw = out.w + out.v, oav = out.w + out.v + out.pw;

  std::vector<Mat> blocks;  // Ebar_i G'_W
  Mat ebar_sum = Mat::Zero(q, out.w);
  Mat ae = sys.E;
  const Mat fg = sys.F * gv;

  Vec cost = Vec::Zero(nvar);
  cost.segment(oav, out.pv) = ts * static_cast<double>(k_end + 1) * fg.cwiseAbs().colwise().sum().transpose();

  std::vector<Vec> rows;
  std::vector<double> rhs;
  for (Index k = 0; k <= k_end; ++k) {
    const auto& pts = data.points(k);
    if (!pts.empty()) {
      Mat tmpl(q, k * out.pw + out.pv);
      for (Index i = 0; i < k; ++i) tmpl.middleCols(i * out.pw, out.pw) = blocks[i];
      tmpl.rightCols(out.pv) = fg;
      const Mat normals = facet_normals(tmpl);
      const Mat proj = normals * tmpl;  // F x (k pw + pv)
      double scale = std::max({tmpl.size() ? tmpl.cwiseAbs().maxCoeff() : 0.0,
                               ebar_sum.size() ? ebar_sum.cwiseAbs().maxCoeff() : 0.0,
                               sys.F.size() ? sys.F.cwiseAbs().maxCoeff() : 0.0});
      if (scale <= 0.0) scale = 1.0;
      Mat ypts(q, static_cast<Index>(pts.size()));
      for (std::size_t j = 0; j < pts.size(); ++j) ypts.col(static_cast<Index>(j)) = pts[j].y;
      const Mat ny = normals * ypts;  // F x points

      for (Index f = 0; f < normals.rows(); ++f) {
        Vec base = Vec::Zero(nvar);
        base.segment(ow, out.w) = (normals.row(f) * ebar_sum).transpose();
        base.segment(ov, out.v) = (normals.row(f) * sys.F).transpose();
        for (Index i = 0; i < k; ++i) {
          base.segment(oaw, out.pw) += proj.row(f).segment(i * out.pw, out.pw).cwiseAbs().transpose();
        }
        base.segment(oav, out.pv) = proj.row(f).tail(out.pv).cwiseAbs().transpose();
        const bool zero_row = base.size() == 0 || base.cwiseAbs().maxCoeff() <= 1e-12 * scale;
        for (double sgn : {1.0, -1.0}) {
          const double b = sgn > 0 ? ny.row(f).maxCoeff() : (-ny.row(f)).maxCoeff();
          if (zero_row) {
            ++out.zero_rows;
            if (b > options.zero_row_tol) {
              throw CoverageError("identification: deviation at step " + std::to_string(k) +
                                      " lies outside the span of the disturbance channels (run coverage_check)",
                                  k);
            }
            continue;
          }
          Vec row = base;
          row.segment(0, out.w + out.v) *= sgn;
          rows.push_back(std::move(row));
          rhs.push_back(b);
        }
      }
    }
    // extend the tube to k + 1
    const Mat ebar = sys.C * ae;
    blocks.push_back(ebar * gw);
    ebar_sum += ebar;
    if (k < k_end) {
      cost.segment(oaw, out.pw) +=
          ts * static_cast<double>(k_end - k) * blocks.back().cwiseAbs().colwise().sum().transpose();
    }
    ae = sys.A * ae;
  }

  LinearProgram lp;
  lp.cost = cost;
  lp.a.resize(static_cast<Index>(rows.size()), nvar);
  lp.b.resize(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    lp.a.row(static_cast<Index>(i)) = rows[i].transpose();
    lp.b[static_cast<Index>(i)] = rhs[i];
  }
  lp.lower = Vec::Zero(nvar);
  lp.upper = Vec::Constant(nvar, kInf);
  if (options.free_centers) {
    lp.lower.head(out.w + out.v).setConstant(-kInf);
  } else {
    lp.upper.head(out.w + out.v).setZero();
  }
  if (options.alpha_w_fixed) {
    require_dims(options.alpha_w_fixed->size() == out.pw, "build_ident_lp: fixed alpha_W size");
    lp.lower.segment(oaw, out.pw) = *options.alpha_w_fixed;
    lp.upper.segment(oaw, out.pw) = *options.alpha_w_fixed;
  }
  if (options.alpha_v_fixed) {
    require_dims(options.alpha_v_fixed->size() == out.pv, "build_ident_lp: fixed alpha_V size");
    lp.lower.segment(oav, out.pv) = *options.alpha_v_fixed;
    lp.upper.segment(oav, out.pv) = *options.alpha_v_fixed;
  }
  out.lp = std::move(lp);
  return out;
}

Vec tube_cost_per_output(const LtiSystem& sys, Index k_end) {
  if (!sys.is_discrete()) throw std::invalid_argument("tube_cost: system must be discrete");
  const double ts = *sys.sample_time;
  const Mat gw = sys.W.generators();
  const Vec dv = (sys.F * sys.V.generators()).cwiseAbs().rowwise().sum();
  Vec acc = Vec::Zero(sys.outputs());
  Vec total = Vec::Zero(sys.outputs());
  Mat ae = sys.E;
  for (Index k = 0; k <= k_end; ++k) {
    total += ts * (acc + dv);
    acc += (sys.C * ae * gw).cwiseAbs().rowwise().sum();
    ae = sys.A * ae;
  }
  return total;
}

double tube_cost(const LtiSystem& sys, Index k_end) { return tube_cost_per_output(sys, k_end).sum(); }

IdentResult identify_uncertainty(const LtiSystem& sys, const DeviationData& data, const IdentOptions& options) {
  const IdentLp ilp = build_ident_lp(sys, data, options);
  const LpSolution sol = solve_lp(ilp.lp, options.lp);
  if (sol.status == LpStatus::infeasible) {
    throw InfeasibleError("identify_uncertainty: no conformant disturbance parameters (LP infeasible)");
  }
  if (sol.status == LpStatus::unbounded) throw UnboundedError("identify_uncertainty: LP unbounded");

  IdentResult r;
  const Vec& x = sol.x;
  r.c_w = x.segment(0, ilp.w);
  r.c_v = x.segment(ilp.w, ilp.v);
  r.alpha_w = x.segment(ilp.w + ilp.v, ilp.pw).cwiseMax(0.0);
  r.alpha_v = x.segment(ilp.w + ilp.v + ilp.pw, ilp.pv).cwiseMax(0.0);
  r.cost = sol.cost;
  r.lp_stats = sol.stats;
  r.windows = data.windows();
  r.model = sys.with_disturbances(Zonotope(r.c_w, sys.W.template_generators(), r.alpha_w),
                                  Zonotope(r.c_v, sys.V.template_generators(), r.alpha_v));
  r.output_cost = tube_cost_per_output(r.model, data.k_end());
  if (options.self_check) {
    ConformanceOptions co;
    co.tol = 1e-8 * (1.0 + data.max_abs());
    const ConformanceReport rep = check_conformance(r.model, data, co);
    r.conformant = rep.pass;
    r.max_margin = rep.max_margin;
  }
  return r;
}

IdentResult identify_uncertainty(const LtiSystem& sys, const TestSuite& suite, const DeviationOptions& dev,
                                 const IdentOptions& options) {
  return identify_uncertainty(sys, build_deviation_data(sys, suite, dev), options);
}

LtiSystem apply_entries(const LtiSystem& sys, const std::vector<FreeEntry>& entries, const Vec& theta) {
  require_dims(theta.size() == static_cast<Index>(entries.size()), "apply_entries: one value per entry");
  LtiSystem out = sys;
  Mat gw = sys.W.template_generators();
  Mat gv = sys.V.template_generators();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const FreeEntry& e = entries[i];
    Mat* m = nullptr;
    switch (e.matrix) {
      case SystemMatrix::A: m = &out.A; break;
      case SystemMatrix::B: m = &out.B; break;
      case SystemMatrix::C: m = &out.C; break;
      case SystemMatrix::D: m = &out.D; break;
      case SystemMatrix::E: m = &out.E; break;
      case SystemMatrix::F: m = &out.F; break;
      case SystemMatrix::GW: m = &gw; break;
      case SystemMatrix::GV: m = &gv; break;
    }
    require_dims(e.row >= 0 && e.row < m->rows() && e.col >= 0 && e.col < m->cols(), "apply_entries: index out of range");
    (*m)(e.row, e.col) = theta[static_cast<Index>(i)];
  }
  out.W = Zonotope(sys.W.center(), gw, sys.W.scales());
  out.V = Zonotope(sys.V.center(), gv, sys.V.scales());
  out.validate();
  return out;
}

FullIdentResult identify_full(const LtiSystem& tmpl, const std::vector<FreeEntry>& entries, const TestSuite& suite,
                              const DeviationOptions& dev, Index budget, const DfoOptions& dfo,
                              const IdentOptions& options) {
  auto realize = [&](const Vec& theta) {
    LtiSystem s = apply_entries(tmpl, entries, theta);
    if (!s.is_discrete()) s = discretize(s, suite.sample_time);
    return s;
  };
  FullIdentResult out;
  if (entries.empty()) {
    out.model = realize(Vec::Zero(0));
    out.inner = identify_uncertainty(out.model, suite, dev, options);
    out.model = out.inner.model;
    out.theta = Vec::Zero(0);
    return out;
  }
  IdentOptions inner = options;
  inner.self_check = false;
  DfoProblem p;
  const Index d = static_cast<Index>(entries.size());
  p.lower.resize(d);
  p.upper.resize(d);
  p.start.resize(d);
  const LtiSystem probe = apply_entries(tmpl, {}, Vec::Zero(0));
  for (Index i = 0; i < d; ++i) {
    const FreeEntry& e = entries[i];
    p.lower[i] = e.lower;
    p.upper[i] = e.upper;
    double current = 0.0;
    switch (e.matrix) {
      case SystemMatrix::A: current = probe.A(e.row, e.col); break;
      case SystemMatrix::B: current = probe.B(e.row, e.col); break;
      case SystemMatrix::C: current = probe.C(e.row, e.col); break;
      case SystemMatrix::D: current = probe.D(e.row, e.col); break;
      case SystemMatrix::E: current = probe.E(e.row, e.col); break;
      case SystemMatrix::F: current = probe.F(e.row, e.col); break;
      case SystemMatrix::GW: current = probe.W.template_generators()(e.row, e.col); break;
      case SystemMatrix::GV: current = probe.V.template_generators()(e.row, e.col); break;
    }
    p.start[i] = std::clamp(current, e.lower, e.upper);
  }
  p.budget = budget;
  p.objective = [&](const Vec& theta) -> DfoEval {
    try {
      const IdentResult r = identify_uncertainty(realize(theta), suite, dev, inner);
      return {r.cost, true, 0.0};
    } catch (const CoverageError&) {
    } catch (const InfeasibleError&) {
    } catch (const UnboundedError&) {
    }
    return {0.0, false, 1.0};
  };
  const DfoResult best = minimize_dfo(p, dfo);
  out.theta = best.x;
  out.evaluations = best.evaluations;
  out.inner = identify_uncertainty(realize(best.x), suite, dev, options);
  out.model = out.inner.model;
  return out;
}

// ---- coverage ---------------------------------------------------------------

CoverageReport coverage_check(const LtiSystem& sys, const DeviationData& data, double tol) {
  require_dims(data.output_dim() == sys.outputs(), "coverage_check: output dimension");
  CoverageReport rep;
  rep.tol = tol;
  const Index q = sys.outputs();
  Mat ae = sys.E;
  Mat j = sys.F;  // grows as [Ebar_0, ..., Ebar_{k-1}, F]
  for (Index k = 0; k <= data.k_end(); ++k) {
    StepCoverage sc;
    sc.step = k;
    Mat basis(q, 0);
    if (j.size() > 0) {
      Eigen::JacobiSVD<Mat> svd(j, Eigen::ComputeThinU);
      const Vec& s = svd.singularValues();
      const double smax = s.size() ? s[0] : 0.0;
      for (Index i = 0; i < s.size(); ++i) {
        if (s[i] > 1e-9 * smax && s[i] > 1e-300) ++sc.rank;
      }
      basis = svd.matrixU().leftCols(sc.rank);
    }
    sc.full_rank = sc.rank == q;
    if (!sc.full_rank) {
      for (const auto& p : data.points(k)) {
        const double r = (p.y - basis * (basis.transpose() * p.y)).norm();
        if (r > sc.max_residual) {
          sc.max_residual = r;
          sc.worst_case = p.case_index;
          sc.worst_start = p.window_start;
        }
      }
      if (sc.max_residual > tol) {
        rep.covered = false;
        rep.flagged_steps.push_back(k);
      }
    }
    rep.steps.push_back(sc);
    Mat next(q, j.cols() + sys.w_dim());
    next << sys.C * ae, j;
    j = next;
    ae = sys.A * ae;
  }
  return rep;
}

}  // namespace reachsynth
