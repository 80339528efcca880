#include "reachsynth/lp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <utility>
#include <vector>

namespace reachsynth {

LinearProgram::LinearProgram(Vec cost_, Mat a_, Vec b_)
    : cost(std::move(cost_)), a(std::move(a_)), b(std::move(b_)) {
  lower = Vec::Zero(cost.size());
  upper = Vec::Constant(cost.size(), kInf);
}

void LinearProgram::validate() const {
  const Index n = cost.size();
  require_dims(a.cols() == n || a.rows() == 0, "LinearProgram: constraint matrix column count");
  require_dims(a.rows() == b.size(), "LinearProgram: row count of A and b differ");
  require_dims(lower.size() == n && upper.size() == n, "LinearProgram: bound vector sizes");
  for (Index j = 0; j < n; ++j) {
    if (lower[j] > upper[j]) throw InfeasibleError("LinearProgram: lower bound exceeds upper bound");
  }
}

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
  }
  return "unknown";
}

namespace {

constexpr double kPivotEps = 1e-9;

// Dense tableau simplex for  max c.y  s.t.  A y <= b, y >= 0.
// Two phases share the tableau; phase one drives a single artificial column out.
class Tableau {
 public:
  Tableau(const Mat& a, const Vec& b, const Vec& c)
      : m_(static_cast<int>(b.size())), n_(static_cast<int>(c.size())),
        basis_(m_), nonbasis_(n_ + 1), d_((m_ + 2) * (n_ + 2), 0.0) {
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < n_; ++j) at(i, j) = a(i, j);
      basis_[i] = n_ + i;
      at(i, n_) = -1.0;
      at(i, n_ + 1) = b[i];
    }
    for (int j = 0; j < n_; ++j) {
      nonbasis_[j] = j;
      at(m_, j) = -c[j];
    }
    nonbasis_[n_] = -1;
    at(m_ + 1, n_) = 1.0;
  }

  // Returns +inf when unbounded, -inf when infeasible, the optimum otherwise.
  double solve(Vec& y) {
    int r = 0;
    for (int i = 1; i < m_; ++i) {
      if (at(i, n_ + 1) < at(r, n_ + 1)) r = i;
    }
    if (m_ > 0 && at(r, n_ + 1) < -kPivotEps) {
      pivot(r, n_);
      if (!simplex(2) || at(m_ + 1, n_ + 1) < -kPivotEps) return -kInf;
      for (int i = 0; i < m_; ++i) {
        if (basis_[i] == -1) {
          int s = 0;
          for (int j = 1; j <= n_; ++j) {
            if (better(at(i, j), nonbasis_[j], at(i, s), nonbasis_[s])) s = j;
          }
          pivot(i, s);
        }
      }
    }
    const bool bounded = simplex(1);
    y = Vec::Zero(n_);
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] >= 0 && basis_[i] < n_) y[basis_[i]] = at(i, n_ + 1);
    }
    return bounded ? at(m_, n_ + 1) : kInf;
  }

  Index pivots() const { return pivots_; }

  // Nonbasic columns at the optimum: j < n means y_j = 0, j >= n means row j - n is tight.
  std::vector<int> nonbasic() const {
    std::vector<int> out;
    for (int j = 0; j <= n_; ++j)
      if (nonbasis_[j] >= 0) out.push_back(nonbasis_[j]);
    return out;
  }

 private:
  double& at(int i, int j) { return d_[static_cast<std::size_t>(i) * (n_ + 2) + j]; }

  static bool better(double v1, int i1, double v2, int i2) {
    return v1 < v2 || (v1 == v2 && i1 < i2);
  }

  bool simplex(int phase) {
    const int obj = m_ + phase - 1;
    const Index cap = 50 * (static_cast<Index>(m_) + n_ + 10) + 1000;
    for (;;) {
      if (pivots_ > cap) throw std::runtime_error("solve_lp: pivot limit exceeded");
      // Dantzig pricing, Bland's rule once many pivots have been spent.
      const bool bland = pivots_ > cap / 2;
      int s = -1;
      for (int j = 0; j <= n_; ++j) {
        if (nonbasis_[j] == -phase) continue;
        if (bland) {
          if (at(obj, j) < -kPivotEps && (s == -1 || nonbasis_[j] < nonbasis_[s])) s = j;
        } else if (s == -1 || better(at(obj, j), nonbasis_[j], at(obj, s), nonbasis_[s])) {
          s = j;
        }
      }
      if (s == -1 || at(obj, s) >= -kPivotEps) return true;
      int r = -1;
      for (int i = 0; i < m_; ++i) {
        if (at(i, s) <= kPivotEps) continue;
        if (r == -1) {
          r = i;
          continue;
        }
        const double ri = at(i, n_ + 1) / at(i, s);
        const double rr = at(r, n_ + 1) / at(r, s);
        if (ri < rr || (ri == rr && basis_[i] < basis_[r])) r = i;
      }
      if (r == -1) return false;
      pivot(r, s);
    }
  }

  void pivot(int r, int s) {
    ++pivots_;
    const int w = n_ + 2;
    double* row_r = &d_[static_cast<std::size_t>(r) * w];
    const double inv = 1.0 / row_r[s];
    for (int i = 0; i < m_ + 2; ++i) {
      if (i == r) continue;
      double* row_i = &d_[static_cast<std::size_t>(i) * w];
      if (row_i[s] == 0.0) continue;
      const double f = row_i[s] * inv;
      for (int j = 0; j < w; ++j) row_i[j] -= row_r[j] * f;
      row_i[s] = row_r[s] * f;
    }
    for (int j = 0; j < w; ++j) {
      if (j != s) row_r[j] *= inv;
    }
    for (int i = 0; i < m_ + 2; ++i) {
      if (i != r) at(i, s) *= -inv;
    }
    row_r[s] = inv;
    std::swap(basis_[r], nonbasis_[s]);
  }

  int m_;
  int n_;
  std::vector<int> basis_;
  std::vector<int> nonbasis_;
  std::vector<double> d_;
  Index pivots_ = 0;
};

// Affine change of variables x = offset + map * y with y >= 0.
struct StandardForm {
  Mat map;            // n x ny
  Vec offset;         // n
  Mat rows;           // scaled rows of  R y <= h
  Vec rhs;
  Vec objective;      // maximize objective . y (scaled)
  Vec column_scale;   // y = z / column_scale
  double objective_scale = 1.0;
  double objective_offset = 0.0;
  std::vector<Index> free_columns;  // columns without any upper bound row
};

StandardForm to_standard_form(const LinearProgram& lp, double tol, bool& trivially_infeasible) {
  const Index n = lp.num_variables();
  trivially_infeasible = false;

  std::vector<std::pair<Index, double>> columns;  // (variable, sign)
  Vec offset = Vec::Zero(n);
  std::vector<std::pair<Index, double>> upper_rows;  // (y column, bound)
  for (Index j = 0; j < n; ++j) {
    const bool lo = std::isfinite(lp.lower[j]);
    const bool hi = std::isfinite(lp.upper[j]);
    if (lo) {
      offset[j] = lp.lower[j];
      columns.emplace_back(j, 1.0);
      if (hi) upper_rows.emplace_back(static_cast<Index>(columns.size()) - 1, lp.upper[j] - lp.lower[j]);
    } else if (hi) {
      offset[j] = lp.upper[j];
      columns.emplace_back(j, -1.0);
    } else {
      columns.emplace_back(j, 1.0);
      columns.emplace_back(j, -1.0);
    }
  }
  const Index ny = static_cast<Index>(columns.size());
  StandardForm sf;
  sf.map = Mat::Zero(n, ny);
  for (Index k = 0; k < ny; ++k) sf.map(columns[k].first, k) = columns[k].second;
  sf.offset = offset;

  // -A x <= -b   ->   (-A map) y <= -b + A offset
  Mat r_rows(lp.num_rows() + static_cast<Index>(upper_rows.size()), ny);
  Vec r_rhs(r_rows.rows());
  Index used = 0;
  if (lp.num_rows() > 0) {
    const Mat am = lp.a * sf.map;
    const Vec ao = lp.a * offset;
    for (Index i = 0; i < lp.num_rows(); ++i) {
      const double scale = am.row(i).cwiseAbs().maxCoeff();
      const double h = -lp.b[i] + ao[i];
      if (scale <= 0.0) {
        if (h < -tol) trivially_infeasible = true;
        continue;
      }
      r_rows.row(used) = -am.row(i) / scale;
      r_rhs[used] = h / scale;
      ++used;
    }
  }
  std::vector<bool> bounded(ny, false);
  for (const auto& [col, bound] : upper_rows) {
    r_rows.row(used).setZero();
    r_rows(used, col) = 1.0;
    r_rhs[used] = bound;
    bounded[col] = true;
    ++used;
  }
  sf.rows = r_rows.topRows(used);
  sf.rhs = r_rhs.head(used);

  Vec obj = -(sf.map.transpose() * lp.cost);
  sf.objective_offset = lp.cost.dot(offset);

  sf.column_scale = Vec::Ones(ny);
  for (Index j = 0; j < ny; ++j) {
    const double s = sf.rows.rows() > 0 ? sf.rows.col(j).cwiseAbs().maxCoeff() : 0.0;
    if (s > 0.0) sf.column_scale[j] = s;
  }
  for (Index j = 0; j < ny; ++j) {
    sf.rows.col(j) /= sf.column_scale[j];
    obj[j] /= sf.column_scale[j];
  }
  const double omax = obj.size() > 0 ? obj.cwiseAbs().maxCoeff() : 0.0;
  sf.objective_scale = omax > 0.0 ? omax : 1.0;
  sf.objective = obj / sf.objective_scale;
  for (Index j = 0; j < ny; ++j) {
    if (!bounded[j]) sf.free_columns.push_back(j);
  }
  return sf;
}

// Tableau updates accumulate round-off on badly scaled rows. Re-solve the vertex
// from its defining constraints and keep it if it is at least as feasible.
void polish_vertex(const Mat& a, const Vec& b, const std::vector<int>& nonbasic, Vec& y) {
  const Index n = y.size();
  if (static_cast<Index>(nonbasic.size()) != n || n == 0) return;
  Mat k(n, n);
  Vec rhs(n);
  for (Index i = 0; i < n; ++i) {
    const int j = nonbasic[static_cast<std::size_t>(i)];
    if (j < n) {
      k.row(i).setZero();
      k(i, j) = 1.0;
      rhs[i] = 0.0;
    } else {
      k.row(i) = a.row(j - n);
      rhs[i] = b[j - n];
    }
  }
  Eigen::FullPivLU<Mat> lu(k);
  if (!lu.isInvertible()) return;
  const Vec cand = lu.solve(rhs);
  if (!cand.allFinite()) return;
  auto worst = [&](const Vec& v) {
    double w = std::max(0.0, -v.minCoeff());
    if (a.rows() > 0) w = std::max(w, (a * v - b).maxCoeff());
    return w;
  };
  if (worst(cand) <= worst(y)) y = cand.cwiseMax(0.0);
}

struct SubResult {
  double value;
  Vec z;
  Index pivots;
};

SubResult solve_subset(const StandardForm& sf, const std::vector<Index>& active, double artificial_bound) {
  const Index ny = sf.objective.size();
  const Index extra = artificial_bound > 0.0 ? static_cast<Index>(sf.free_columns.size()) : 0;
  Mat a(static_cast<Index>(active.size()) + extra, ny);
  Vec b(a.rows());
  for (std::size_t i = 0; i < active.size(); ++i) {
    a.row(static_cast<Index>(i)) = sf.rows.row(active[i]);
    b[static_cast<Index>(i)] = sf.rhs[active[i]];
  }
  for (Index k = 0; k < extra; ++k) {
    const Index row = static_cast<Index>(active.size()) + k;
    a.row(row).setZero();
    a(row, sf.free_columns[k]) = 1.0;
    b[row] = artificial_bound;
  }
  Tableau t(a, b, sf.objective);
  SubResult r;
  r.value = t.solve(r.z);
  r.pivots = t.pivots();
  if (std::isfinite(r.value)) polish_vertex(a, b, t.nonbasic(), r.z);
  return r;
}

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const LpOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  lp.validate();
  LpSolution sol;
  sol.stats.rows = lp.num_rows();
  sol.stats.variables = lp.num_variables();

  bool trivially_infeasible = false;
  const StandardForm sf = to_standard_form(lp, options.feasibility_tol, trivially_infeasible);
  auto finish = [&](LpStatus status) {
    sol.status = status;
    sol.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return sol;
  };
  if (trivially_infeasible) return finish(LpStatus::infeasible);

  const Index m = sf.rows.rows();
  const Index ny = sf.objective.size();
  std::vector<Index> active;
  std::vector<char> in_set(m, 0);

  auto violations_at = [&](const Vec& z) { return Vec(sf.rows * z - sf.rhs); };
  auto add_most_violated = [&](const Vec& viol, double threshold, Index count) {
    std::vector<Index> cand;
    for (Index i = 0; i < m; ++i) {
      if (!in_set[i] && viol[i] > threshold) cand.push_back(i);
    }
    const Index take = std::min<Index>(count, static_cast<Index>(cand.size()));
    std::partial_sort(cand.begin(), cand.begin() + take, cand.end(), [&](Index x, Index y) {
      return viol[x] > viol[y] || (viol[x] == viol[y] && x < y);
    });
    for (Index k = 0; k < take; ++k) {
      in_set[cand[k]] = 1;
      active.push_back(cand[k]);
    }
    return take;
  };

  if (m <= options.working_set_threshold) {
    active.resize(m);
    std::iota(active.begin(), active.end(), Index{0});
    std::fill(in_set.begin(), in_set.end(), 1);
  } else {
    add_most_violated(violations_at(Vec::Zero(ny)), -kInf, options.rows_per_round);
  }

  const double rhs_scale = 1.0 + (m > 0 ? sf.rhs.cwiseAbs().maxCoeff() : 0.0);
  const double big = 1e8 * rhs_scale;
  Vec z;
  bool hit_artificial = false;
  for (;;) {
    ++sol.stats.rounds;
    SubResult sub = solve_subset(sf, active, 0.0);
    sol.stats.pivots += sub.pivots;
    if (sub.value == -kInf) return finish(LpStatus::infeasible);
    hit_artificial = false;
    if (sub.value == kInf) {
      if (static_cast<Index>(active.size()) == m) return finish(LpStatus::unbounded);
      sub = solve_subset(sf, active, big);
      sol.stats.pivots += sub.pivots;
      if (sub.value == -kInf) return finish(LpStatus::infeasible);
      hit_artificial = true;
    }
    z = sub.z;
    const Vec viol = violations_at(z);
    if (static_cast<Index>(active.size()) == m) break;
    const Index added = add_most_violated(viol, options.feasibility_tol, options.rows_per_round);
    if (added == 0) break;
  }
  if (hit_artificial) return finish(LpStatus::unbounded);

  Vec y(ny);
  for (Index j = 0; j < ny; ++j) y[j] = z[j] / sf.column_scale[j];
  sol.x = sf.offset + sf.map * y;
  sol.cost = lp.cost.dot(sol.x);
  double worst = 0.0;
  if (lp.num_rows() > 0) worst = std::max(worst, (lp.b - lp.a * sol.x).maxCoeff());
  for (Index j = 0; j < lp.num_variables(); ++j) {
    worst = std::max({worst, lp.lower[j] - sol.x[j], sol.x[j] - lp.upper[j]});
  }
  sol.max_violation = worst;
  sol.stats.active_rows = static_cast<Index>(active.size());
  return finish(LpStatus::optimal);
}

}  // namespace reachsynth
