#include <doctest.h>

#include "oracles.hpp"
#include "reachsynth/reach.hpp"

using namespace reachsynth;

namespace {

Mat s1(double v) { return Mat::Constant(1, 1, v); }

// x+ = a x + w, y = x + v; W = [-wb, wb], V = [-vb, vb].
LtiSystem scalar(double a, double wb, double vb = 0.0) {
  return LtiSystem(s1(a), s1(0), s1(1), s1(0), s1(1), s1(1), Zonotope::box(Vec::Constant(1, wb)),
                   Zonotope::box(Vec::Constant(1, vb)), 1.0);
}

LtiSystem random_system(std::mt19937_64& rng, int n, int m, int q, int w, int v, double rho = 0.9) {
  Mat a = oracle::random_matrix(rng, n, n);
  a *= rho / spectral_radius(a);
  return LtiSystem(a, oracle::random_matrix(rng, n, m), oracle::random_matrix(rng, q, n),
                   oracle::random_matrix(rng, q, m), oracle::random_matrix(rng, n, w),
                   oracle::random_matrix(rng, q, v),
                   Zonotope(oracle::random_vector(rng, w, -0.1, 0.1), Mat::Identity(w, w),
                            oracle::random_vector(rng, w, 0.1, 0.5)),
                   Zonotope(oracle::random_vector(rng, v, -0.1, 0.1), Mat::Identity(v, v),
                            oracle::random_vector(rng, v, 0.01, 0.05)),
                   0.1);
}

}  // namespace

TEST_SUITE("reach") {
  TEST_CASE("one reach step") {
    std::mt19937_64 rng(71);
    LtiSystem s = random_system(rng, 3, 2, 2, 2, 2);
    const LtiSystem clean(s.A, s.B, s.C, s.D, s.sample_time);
    const Vec x = oracle::random_vector(rng, 3), u = oracle::random_vector(rng, 2);
    const StepSets st = reach_step(clean, Zonotope(x), u);
    CHECK(st.state.center().isApprox(s.A * x + s.B * u));
    CHECK(znorm(st.state) == 0.0);

    const LtiSystem sc = scalar(0.5, 1.0);
    const StepSets x1 = reach_step(sc, Zonotope::origin(1), Vec::Zero(1));
    CHECK(interval_hull(x1.state).upper[0] == doctest::Approx(1.0));
    const StepSets x2 = reach_step(sc, x1.state, Vec::Zero(1));
    CHECK(interval_hull(x2.state).upper[0] == doctest::Approx(1.5));
    CHECK(interval_hull(x2.state).lower[0] == doctest::Approx(-1.5));

    for (int t = 0; t < 200; ++t) {
      const Zonotope xk(oracle::random_vector(rng, 3), oracle::random_matrix(rng, 3, 2));
      const StepSets nx = reach_step(s, xk, u);
      const Vec member = xk.center() + xk.generators() * oracle::random_vector(rng, 2);
      const Vec w = s.W.center() + s.W.generators() * oracle::random_vector(rng, 2);
      CHECK(contains_point(nx.state, s.A * member + s.B * u + s.E * w, 1e-9));
    }
  }

  TEST_CASE("reach horizon") {
    std::mt19937_64 rng(73);
    const LtiSystem s = random_system(rng, 2, 1, 1, 1, 1);
    const LtiSystem clean(s.A, s.B, s.C, s.D, s.sample_time);
    const ReachSequence z = reach_horizon(clean, Zonotope::origin(2), Mat::Zero(6, 1), 5);
    REQUIRE(z.sets.size() == 6);
    for (const auto& r : z.sets) CHECK(znorm(r) == 0.0);

    Mat a(2, 2);
    a << 1, 0.1, 0, 1;
    Mat e(2, 1);
    e << 0, 1;
    const LtiSystem di(a, Mat::Zero(2, 1), Mat::Identity(2, 2), Mat::Zero(2, 1), e, Mat::Zero(2, 0),
                       Zonotope::box(Vec::Ones(1)), Zonotope::origin(0), 0.1);
    const auto xs = reach_states(di, Zonotope::box(Vec::Ones(2)), Mat::Zero(3, 1), 3);
    for (int k = 0; k <= 3; ++k) CHECK(xs[k].num_generators() == 2 + k);
  }

  TEST_CASE("reach hull equals exhaustive vertex propagation") {
    for (double a : {0.5, -0.8, 1.1}) {
      const LtiSystem s = scalar(a, 0.3);
      for (int k = 1; k <= 10; ++k) {
        const auto xs = reach_states(s, Zonotope(Vec::Constant(1, 0.2)), Mat::Zero(k, 1), k);
        const auto ref = oracle::vertex_propagation_hull(s.A, s.E, Vec::Constant(1, 0.2), s.W.generators(),
                                                         s.W.center(), k);
        const Interval h = interval_hull(xs[k]);
        CHECK(h.lower[0] == doctest::Approx(ref.first[0]).epsilon(1e-12));
        CHECK(h.upper[0] == doctest::Approx(ref.second[0]).epsilon(1e-12));
      }
    }
    std::mt19937_64 rng(79);
    Mat a = oracle::random_matrix(rng, 2, 2);
    a *= 0.9 / spectral_radius(a);
    const Mat e = oracle::random_matrix(rng, 2, 2);
    const LtiSystem s(a, Mat::Zero(2, 1), Mat::Identity(2, 2), Mat::Zero(2, 1), e, Mat::Zero(2, 0),
                      Zonotope(Vec::Zero(2), Mat::Identity(2, 2), Vec::Constant(2, 0.5)), Zonotope::origin(0), 1.0);
    const auto xs = reach_states(s, Zonotope::origin(2), Mat::Zero(6, 1), 6);
    const auto ref = oracle::vertex_propagation_hull(a, e, Vec::Zero(2), s.W.generators(), s.W.center(), 6);
    CHECK(interval_hull(xs[6]).upper.isApprox(ref.second, 1e-12));
  }

  TEST_CASE("deviation reach") {
    const LtiSystem s = scalar(1.0, 0.1, 0.01);
    const Zonotope r0 = deviation_reach(s, 0);
    CHECK(interval_hull(r0).upper[0] == doctest::Approx(0.01));
    const Zonotope r1 = deviation_reach(s, 1);
    CHECK(interval_hull(r1).upper[0] == doctest::Approx(0.11));
    CHECK(interval_hull(r1).lower[0] == doctest::Approx(-0.11));

    std::mt19937_64 rng(83);
    for (int t = 0; t < 10; ++t) {
      const LtiSystem r = random_system(rng, 3, 2, 2, 2, 2);
      const Vec x0 = oracle::random_vector(rng, 3);
      const Mat u = oracle::random_matrix(rng, 9, 2);
      const ReachSequence seq = reach_horizon(r, Zonotope(x0), u, 8);
      const Mat yn = nominal_output(r, x0, u);
      const auto dev = deviation_reach_sequence(r, 8);
      for (int k = 0; k <= 8; ++k) {
        const Interval a = interval_hull(seq.sets[k]);
        const Interval b = interval_hull(dev[k]);
        CHECK((a.lower - yn.row(k).transpose() - b.lower).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((a.upper - yn.row(k).transpose() - b.upper).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(interval_hull(deviation_reach(r, k)).upper.isApprox(b.upper));
      }
    }
  }

  TEST_CASE("enlarging W never shrinks reachable sets") {
    std::mt19937_64 rng(89);
    const LtiSystem s = random_system(rng, 3, 1, 2, 2, 1);
    const LtiSystem big = s.with_disturbances(s.W.with_scales(1.7 * s.W.scales()), s.V);
    const auto a = deviation_reach_sequence(s, 10), b = deviation_reach_sequence(big, 10);
    for (int k = 0; k <= 10; ++k) CHECK(interval_hull(b[k]).contains(interval_hull(a[k])));
  }

  TEST_CASE("terminal set of a scalar contraction") {
    const TerminalResult r = terminal_reach(scalar(0.5, 1.0), Zonotope::origin(1));
    REQUIRE(r.output_set.has_value());
    CHECK(side_length_sum(*r.output_set) == doctest::Approx(4.0).epsilon(1e-5));
    CHECK(znorm(*r.output_set) == doctest::Approx(2.0).epsilon(1e-5));
    CHECK(r.output_hull.upper[0] == doctest::Approx(2.0).epsilon(1e-5));
    // invariance: one more step stays inside within tolerance
    const StepSets next = reach_step(scalar(0.5, 1.0), *r.state_set, Vec::Zero(1));
    Interval grown = r.state_hull;
    grown.lower.array() -= 1e-5;
    grown.upper.array() += 1e-5;
    CHECK(grown.contains(interval_hull(next.state)));
  }

  TEST_CASE("terminal reach edge cases") {
    const TerminalResult still = terminal_reach(scalar(0.5, 0.0), Zonotope::origin(1));
    CHECK(still.converged_at == 0);
    CHECK(znorm(*still.output_set) == 0.0);

    CHECK_THROWS_AS(terminal_reach(scalar(2.0, 1.0), Zonotope::origin(1)), NonConvergenceError);
    CHECK(terminal_reach_run(scalar(2.0, 1.0), Zonotope::origin(1)).status == TerminalStatus::diverged);
    TerminalOptions few;
    few.k_max = 3;
    CHECK(terminal_reach_run(scalar(0.99, 1.0), Zonotope::origin(1), few).status == TerminalStatus::step_limit);

    const TerminalResult dead = terminal_reach(scalar(0.0, 1.0), Zonotope::origin(1));
    CHECK(dead.output_hull.upper[0] == doctest::Approx(1.0));
    CHECK(dead.output_hull.lower[0] == doctest::Approx(-1.0));
    CHECK(dead.converged_at == 1);
  }

  TEST_CASE("terminal reach constraint margins") {
    TerminalOptions o;
    o.constraint = Polytope::from_interval(Interval::symmetric(Vec::Constant(1, 1.5)));
    const TerminalResult r = terminal_reach_run(scalar(0.5, 1.0), Zonotope::origin(1), o);
    CHECK(r.final_margin == doctest::Approx(0.5).epsilon(1e-4));
    CHECK(r.last_violation >= 1);
    o.constraint = Polytope::from_interval(Interval::symmetric(Vec::Constant(1, 3.0)));
    const TerminalResult ok = terminal_reach_run(scalar(0.5, 1.0), Zonotope(Vec::Constant(1, 2.5)), o);
    CHECK(ok.final_margin < 0);
    CHECK(ok.max_margin == doctest::Approx(-0.5));
  }

  TEST_CASE("hull-only mode and generator collapse agree with the full set") {
    std::mt19937_64 rng(97);
    const LtiSystem s = random_system(rng, 3, 1, 2, 2, 1, 0.995);
    TerminalOptions full;
    full.collapse_after = 1 << 30;
    TerminalOptions lean;
    lean.keep_set = false;
    TerminalOptions boxed;
    const Zonotope x0 = Zonotope::box(Vec::Constant(3, 0.1));
    const TerminalResult a = terminal_reach(s, x0, full), b = terminal_reach(s, x0, lean), c = terminal_reach(s, x0, boxed);
    CHECK(a.steps > 600);
    CHECK(a.converged_at == b.converged_at);
    CHECK(a.output_hull.upper.isApprox(b.output_hull.upper, 1e-12));
    CHECK(!b.output_set.has_value());
    // boxing is an outer approximation
    CHECK(interval_hull(*c.state_set).contains(interval_hull(*a.state_set), 1e-9));
    CHECK(c.state_set->num_generators() < a.state_set->num_generators());
  }

  TEST_CASE("csv export") {
    const std::string csv = reach_csv({Zonotope::box(Vec::Ones(2))});
    CHECK(csv == "k,dim,lower,upper\n0,1,-1,1\n0,2,-1,1\n");
  }
}
