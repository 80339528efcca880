#include "reachsynth/dfo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace reachsynth {

namespace {

constexpr double kHuge = 1e30;

struct BudgetOut {};

class Runner {
 public:
  Runner(const DfoProblem& p, const DfoOptions& o) : p_(p), o_(o), width_(p.upper - p.lower) {}

  // Penalized value at normalized point u.
  double eval(const Vec& u) {
    if (evals_ >= p_.budget) throw BudgetOut{};
    ++evals_;
    const Vec x = to_x(u);
    const DfoEval e = p_.objective(x);
    const double margin = std::isfinite(e.margin) ? std::max(e.margin, 0.0) : kHuge;
    double f = std::isfinite(e.cost) ? e.cost : kHuge;
    if (!e.feasible) f = std::min(kHuge, f + o_.penalty * margin);
    if (e.feasible && std::isfinite(e.cost) && (!have_feasible_ || e.cost < best_.cost)) {
      have_feasible_ = true;
      best_.x = x;
      best_.cost = e.cost;
      best_.margin = e.margin;
    }
    if (!have_feasible_ && margin < closest_margin_) closest_margin_ = margin;
    return f;
  }

  Vec to_x(const Vec& u) const {
    return (p_.lower.array() + u.array() * width_.array()).matrix();
  }

  Vec to_u(const Vec& x) const {
    Vec u(x.size());
    for (Index i = 0; i < x.size(); ++i) u[i] = width_[i] > 0 ? (x[i] - p_.lower[i]) / width_[i] : 0.0;
    return u.cwiseMax(0.0).cwiseMin(1.0);
  }

  // One Nelder-Mead run from u0; returns the best normalized vertex.
  Vec nelder_mead(const Vec& u0) {
    const Index d = u0.size();
    std::vector<Vec> simplex(d + 1, u0);
    std::vector<double> f(d + 1);
    for (Index i = 0; i < d; ++i) {
      Vec v = u0;
      v[i] += (v[i] + o_.initial_step <= 1.0) ? o_.initial_step : -o_.initial_step;
      simplex[i + 1] = v;
    }
    for (Index i = 0; i <= d; ++i) f[i] = eval(simplex[i]);

    std::vector<Index> order(d + 1);
    auto clamp = [](Vec v) { return Vec(v.cwiseMax(0.0).cwiseMin(1.0)); };
    for (;;) {
      for (Index i = 0; i <= d; ++i) order[i] = i;
      std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return f[a] < f[b]; });
      {
        std::vector<Vec> s2;
        std::vector<double> f2;
        for (Index i : order) {
          s2.push_back(simplex[i]);
          f2.push_back(f[i]);
        }
        simplex.swap(s2);
        f.swap(f2);
      }
      double diameter = 0.0;
      for (Index i = 1; i <= d; ++i) diameter = std::max(diameter, (simplex[i] - simplex[0]).cwiseAbs().maxCoeff());
      last_best_ = simplex[0];
      if (diameter < o_.xtol) return simplex[0];

      Vec centroid = Vec::Zero(d);
      for (Index i = 0; i < d; ++i) centroid += simplex[i];
      centroid /= static_cast<double>(d);

      const Vec xr = clamp(centroid + (centroid - simplex[d]));
      const double fr = eval(xr);
      if (fr < f[0]) {
        const Vec xe = clamp(centroid + 2.0 * (centroid - simplex[d]));
        const double fe = eval(xe);
        if (fe < fr) {
          simplex[d] = xe;
          f[d] = fe;
        } else {
          simplex[d] = xr;
          f[d] = fr;
        }
        continue;
      }
      if (fr < f[d - 1]) {
        simplex[d] = xr;
        f[d] = fr;
        continue;
      }
      const bool outside = fr < f[d];
      const Vec xc = outside ? Vec(centroid + 0.5 * (xr - centroid)) : Vec(centroid + 0.5 * (simplex[d] - centroid));
      const double fc = eval(xc);
      if (fc < (outside ? fr : f[d])) {
        simplex[d] = xc;
        f[d] = fc;
        continue;
      }
      for (Index i = 1; i <= d; ++i) {
        simplex[i] = simplex[0] + 0.5 * (simplex[i] - simplex[0]);
        f[i] = eval(simplex[i]);
      }
    }
  }

  const DfoProblem& p_;
  const DfoOptions& o_;
  Vec width_;
  Index evals_ = 0;
  bool have_feasible_ = false;
  double closest_margin_ = std::numeric_limits<double>::infinity();
  DfoResult best_;
  Vec last_best_;
};

}  // namespace

DfoResult minimize_dfo(const DfoProblem& problem, const DfoOptions& options) {
  const Index d = problem.lower.size();
  require_dims(d > 0, "minimize_dfo: no parameters");
  require_dims(problem.upper.size() == d && problem.start.size() == d, "minimize_dfo: bound/start sizes");
  if (!problem.objective) throw std::invalid_argument("minimize_dfo: objective not set");
  if (problem.budget <= 0) throw std::invalid_argument("minimize_dfo: budget must be positive");
  for (Index i = 0; i < d; ++i) {
    if (!(problem.lower[i] <= problem.upper[i])) throw std::invalid_argument("minimize_dfo: lower > upper");
    if (problem.start[i] < problem.lower[i] || problem.start[i] > problem.upper[i]) {
      throw std::invalid_argument("minimize_dfo: start outside bounds");
    }
  }

  Runner run(problem, options);
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Index completed = 0;
  try {
    for (Index s = 0; s < std::max<Index>(options.starts, 1); ++s) {
      Vec u0(d);
      if (s == 0) {
        u0 = run.to_u(problem.start);
      } else {
        for (Index i = 0; i < d; ++i) u0[i] = unit(rng);
      }
      run.nelder_mead(u0);
      ++completed;
    }
    // Spend what is left polishing the incumbent with fresh simplices.
    for (int polish = 0; polish < 3 && run.have_feasible_; ++polish) {
      const double before = run.best_.cost;
      run.nelder_mead(run.to_u(run.best_.x));
      if (!(run.best_.cost < before - 1e-12 * (1.0 + std::abs(before)))) break;
    }
  } catch (const BudgetOut&) {
  }
  if (!run.have_feasible_) {
    throw BudgetExhaustedError("minimize_dfo: no feasible point within " + std::to_string(problem.budget) +
                               " evaluations (closest margin " + std::to_string(run.closest_margin_) + ")");
  }
  DfoResult out = run.best_;
  out.evaluations = run.evals_;
  out.starts_completed = completed;
  return out;
}

}  // namespace reachsynth
