#include "reachsynth/lti_system.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace reachsynth {

namespace {

Mat zeros_if_empty(const Mat& m, Index rows, Index cols) {
  if (m.size() == 0) return Mat::Zero(rows, cols);
  require_dims(m.rows() == rows && m.cols() == cols, "interconnect: wiring block has the wrong shape");
  return m;
}

Mat block_diag(const Mat& a, const Mat& b) {
  Mat out = Mat::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

std::vector<std::string> default_labels(const char* prefix, Index n) {
  std::vector<std::string> out;
  for (Index i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i + 1));
  return out;
}

bool nonzero(const Mat& m) {
  if (m.size() == 0) return false;
  return m.cwiseAbs().maxCoeff() > 1e-13;
}

std::optional<double> merged_timing(const LtiSystem& s1, const LtiSystem& s2) {
  const bool static1 = s1.states() == 0;
  const bool static2 = s2.states() == 0;
  if (static1 && !s1.sample_time) return s2.sample_time;
  if (static2 && !s2.sample_time) return s1.sample_time;
  if (s1.sample_time.has_value() != s2.sample_time.has_value()) {
    throw DimensionError("interconnect: mixing continuous and discrete subsystems");
  }
  if (s1.sample_time && std::abs(*s1.sample_time - *s2.sample_time) > 1e-12) {
    throw DimensionError("interconnect: subsystems have different sample times");
  }
  return s1.sample_time;
}

}  // namespace

LtiSystem::LtiSystem(Mat a, Mat b, Mat c, Mat d, std::optional<double> dt)
    : LtiSystem(a, b, c, d, Mat::Zero(a.rows(), 0), Mat::Zero(c.rows(), 0), Zonotope::origin(0),
                Zonotope::origin(0), dt) {}

LtiSystem::LtiSystem(Mat a, Mat b, Mat c, Mat d, Mat e, Mat f, Zonotope w, Zonotope v, std::optional<double> dt)
    : A(std::move(a)), B(std::move(b)), C(std::move(c)), D(std::move(d)), E(std::move(e)), F(std::move(f)),
      W(std::move(w)), V(std::move(v)), sample_time(dt) {
  w_labels = default_labels("w", E.cols());
  v_labels = default_labels("v", F.cols());
  validate();
}

void LtiSystem::validate() const {
  const Index n = A.rows();
  require_dims(A.cols() == n, "LtiSystem: A must be square");
  require_dims(B.rows() == n, "LtiSystem: B rows must equal state dimension");
  require_dims(C.cols() == n, "LtiSystem: C columns must equal state dimension");
  require_dims(D.rows() == C.rows() && D.cols() == B.cols(), "LtiSystem: D must be outputs x inputs");
  require_dims(E.rows() == n, "LtiSystem: E rows must equal state dimension");
  require_dims(F.rows() == C.rows(), "LtiSystem: F rows must equal output dimension");
  require_dims(W.dim() == E.cols(), "LtiSystem: W dimension must equal columns of E");
  require_dims(V.dim() == F.cols(), "LtiSystem: V dimension must equal columns of F");
  require_dims(static_cast<Index>(w_labels.size()) == E.cols(), "LtiSystem: one label per W channel");
  require_dims(static_cast<Index>(v_labels.size()) == F.cols(), "LtiSystem: one label per V channel");
  if (sample_time && !(*sample_time > 0.0)) throw std::invalid_argument("LtiSystem: sample time must be positive");
}

LtiSystem LtiSystem::with_disturbances(Zonotope w, Zonotope v) const {
  LtiSystem out = *this;
  out.W = std::move(w);
  out.V = std::move(v);
  out.validate();
  return out;
}

LtiSystem static_gain(const Mat& d, std::optional<double> dt) {
  return LtiSystem(Mat::Zero(0, 0), Mat::Zero(0, d.cols()), Mat::Zero(d.rows(), 0), d, dt);
}

LtiSystem unit_delay(Index dim, double dt) {
  return LtiSystem(Mat::Zero(dim, dim), Mat::Identity(dim, dim), Mat::Identity(dim, dim), Mat::Zero(dim, dim), dt);
}

Mat expm(const Mat& m) {
  require_dims(m.rows() == m.cols(), "expm: matrix must be square");
  if (m.size() == 0) return m;
  return m.exp();
}

LtiSystem discretize(const LtiSystem& sys, double dt) {
  if (sys.is_discrete()) throw std::invalid_argument("discretize: system is already discrete");
  if (!(dt > 0.0)) throw std::invalid_argument("discretize: sample time must be positive");
  const Index n = sys.states();
  const Index m = sys.inputs();
  const Index w = sys.w_dim();
  Mat aug = Mat::Zero(n + m + w, n + m + w);
  aug.topLeftCorner(n, n) = sys.A;
  aug.block(0, n, n, m) = sys.B;
  aug.block(0, n + m, n, w) = sys.E;
  const Mat phi = expm(aug * dt);
  LtiSystem out = sys;
  out.A = phi.topLeftCorner(n, n);
  out.B = phi.block(0, n, n, m);
  out.E = phi.block(0, n + m, n, w);
  out.sample_time = dt;
  return out;
}

LtiSystem interconnect(const LtiSystem& s1, const LtiSystem& s2, const Interconnection& wiring) {
  s1.validate();
  s2.validate();
  const auto timing = merged_timing(s1, s2);
  const Index n1 = s1.states(), n2 = s2.states();
  const Index m1 = s1.inputs(), m2 = s2.inputs();
  const Index q1 = s1.outputs(), q2 = s2.outputs();
  const Index nr = wiring.external_inputs, nz = wiring.outputs;

  const Mat r1 = zeros_if_empty(wiring.r_to_u1, m1, nr);
  const Mat r2 = zeros_if_empty(wiring.r_to_u2, m2, nr);
  const Mat k21 = zeros_if_empty(wiring.y2_to_u1, m1, q2);
  const Mat k12 = zeros_if_empty(wiring.y1_to_u2, m2, q1);
  const Mat z1 = zeros_if_empty(wiring.y1_to_z, nz, q1);
  const Mat z2 = zeros_if_empty(wiring.y2_to_z, nz, q2);
  const Mat zr = zeros_if_empty(wiring.r_to_z, nz, nr);

  const Mat abd = block_diag(s1.A, s2.A);
  const Mat bbd = block_diag(s1.B, s2.B);
  const Mat cbd = block_diag(s1.C, s2.C);
  const Mat dbd = block_diag(s1.D, s2.D);
  const Mat ebd = block_diag(s1.E, s2.E);
  const Mat fbd = block_diag(s1.F, s2.F);
  Mat k = Mat::Zero(m1 + m2, q1 + q2);
  k.topRightCorner(m1, q2) = k21;
  k.bottomLeftCorner(m2, q1) = k12;
  Mat r(m1 + m2, nr);
  r << r1, r2;
  Mat z(nz, q1 + q2);
  z << z1, z2;

  // u = R r + K y with y = Cbd x + Dbd u + Fbd v  =>  (I - K Dbd) u = R r + K Cbd x + K Fbd v
  const Index mu = m1 + m2;
  const Mat loop = Mat::Identity(mu, mu) - k * dbd;
  Mat l = Mat::Identity(mu, mu);
  if (mu > 0) {
    Eigen::FullPivLU<Mat> lu(loop);
    if (!lu.isInvertible() || std::abs(lu.determinant()) < 1e-12) {
      throw AlgebraicLoopError("interconnect: algebraic loop, I - K D is singular");
    }
    l = lu.inverse();
  }
  const Mat lk = l * k;
  const Mat a = abd + bbd * lk * cbd;
  const Mat b = bbd * l * r;
  const Mat sv = bbd * lk * fbd;        // v -> state
  const Mat c = z * (cbd + dbd * lk * cbd);
  const Mat d = z * dbd * l * r + zr;
  const Mat ov = z * (fbd + dbd * lk * fbd);  // v -> z
  const Index n = n1 + n2;

  struct Block {
    Mat to_state;
    Mat to_output;
    const Zonotope* set;
    const std::vector<std::string>* labels;
    bool is_w;
  };
  const Index w1 = s1.w_dim(), v1 = s1.v_dim(), w2 = s2.w_dim(), v2 = s2.v_dim();
  const Block blocks[4] = {
      {ebd.leftCols(w1), Mat::Zero(nz, w1), &s1.W, &s1.w_labels, true},
      {sv.leftCols(v1), ov.leftCols(v1), &s1.V, &s1.v_labels, false},
      {ebd.rightCols(w2), Mat::Zero(nz, w2), &s2.W, &s2.w_labels, true},
      {sv.rightCols(v2), ov.rightCols(v2), &s2.V, &s2.v_labels, false},
  };

  Mat e_cl(n, 0), f_cl(nz, 0);
  Zonotope w_cl = Zonotope::origin(0), v_cl = Zonotope::origin(0);
  std::vector<std::string> wl, vl;
  auto append = [](Mat& dst, const Mat& cols) {
    Mat next(dst.rows(), dst.cols() + cols.cols());
    next << dst, cols;
    dst = next;
  };
  for (const Block& blk : blocks) {
    const bool to_state = blk.is_w || nonzero(blk.to_state);
    const bool to_output = !blk.is_w && (nonzero(blk.to_output) || !to_state);
    if (to_state) {
      append(e_cl, blk.to_state);
      w_cl = cartesian_product(w_cl, *blk.set);
      wl.insert(wl.end(), blk.labels->begin(), blk.labels->end());
    }
    if (to_output) {
      append(f_cl, blk.to_output);
      v_cl = cartesian_product(v_cl, *blk.set);
      vl.insert(vl.end(), blk.labels->begin(), blk.labels->end());
    }
  }
  LtiSystem out(a, b, c, d, e_cl, f_cl, w_cl, v_cl, timing);
  out.w_labels = wl;
  out.v_labels = vl;
  out.validate();
  return out;
}

LtiSystem series(const LtiSystem& s1, const LtiSystem& s2) {
  require_dims(s1.outputs() == s2.inputs(), "series: output dimension of s1 must equal input dimension of s2");
  Interconnection w;
  w.external_inputs = s1.inputs();
  w.outputs = s2.outputs();
  w.r_to_u1 = Mat::Identity(s1.inputs(), s1.inputs());
  w.y1_to_u2 = Mat::Identity(s2.inputs(), s1.outputs());
  w.y2_to_z = Mat::Identity(s2.outputs(), s2.outputs());
  return interconnect(s1, s2, w);
}

LtiSystem feedback(const LtiSystem& s1, const LtiSystem& s2) {
  require_dims(s1.outputs() == s2.inputs() && s2.outputs() == s1.inputs(),
               "feedback: loop dimensions do not match");
  Interconnection w;
  w.external_inputs = s1.inputs();
  w.outputs = s1.outputs();
  w.r_to_u1 = Mat::Identity(s1.inputs(), s1.inputs());
  w.y2_to_u1 = Mat::Identity(s1.inputs(), s2.outputs());
  w.y1_to_u2 = Mat::Identity(s2.inputs(), s1.outputs());
  w.y1_to_z = Mat::Identity(s1.outputs(), s1.outputs());
  return interconnect(s1, s2, w);
}

Trajectory simulate(const LtiSystem& sys, const Vec& x0, const Mat& u, const Mat& w, const Mat& v) {
  if (!sys.is_discrete()) throw std::invalid_argument("simulate: system must be discrete");
  const Index steps = u.rows();
  require_dims(x0.size() == sys.states(), "simulate: x0 size");
  require_dims(u.cols() == sys.inputs() || steps == 0, "simulate: input width");
  const bool has_w = w.size() > 0;
  const bool has_v = v.size() > 0;
  require_dims(!has_w || (w.rows() >= steps && w.cols() == sys.w_dim()), "simulate: disturbance sequence shape");
  require_dims(!has_v || (v.rows() >= steps && v.cols() == sys.v_dim()), "simulate: noise sequence shape");
  Trajectory t;
  t.states.resize(steps + 1, sys.states());
  t.outputs.resize(steps, sys.outputs());
  Vec x = x0;
  t.states.row(0) = x.transpose();
  for (Index k = 0; k < steps; ++k) {
    const Vec uk = u.row(k).transpose();
    Vec y = sys.C * x + sys.D * uk;
    if (has_v) y += sys.F * v.row(k).transpose();
    t.outputs.row(k) = y.transpose();
    Vec xn = sys.A * x + sys.B * uk;
    if (has_w) xn += sys.E * w.row(k).transpose();
    x = xn;
    t.states.row(k + 1) = x.transpose();
  }
  return t;
}

Mat nominal_output(const LtiSystem& sys, const Vec& x0, const Mat& u) {
  if (!sys.is_discrete()) throw std::invalid_argument("nominal_output: system must be discrete");
  require_dims(x0.size() == sys.states(), "nominal_output: x0 size");
  require_dims(u.cols() == sys.inputs() || u.rows() == 0, "nominal_output: input width");
  Mat y(u.rows(), sys.outputs());
  Vec x = x0;
  for (Index k = 0; k < u.rows(); ++k) {
    const Vec uk = u.row(k).transpose();
    y.row(k) = (sys.C * x + sys.D * uk).transpose();
    x = sys.A * x + sys.B * uk;
  }
  return y;
}

DisturbanceMaps disturbance_maps(const LtiSystem& sys, Index k) {
  require_dims(k >= 0, "disturbance_maps: k must be non-negative");
  DisturbanceMaps out;
  Mat ae = sys.E;
  for (Index i = 0; i < k; ++i) {
    out.ebar.push_back(sys.C * ae);
    ae = sys.A * ae;
  }
  out.j.resize(sys.outputs(), k * sys.w_dim() + sys.v_dim());
  for (Index i = 0; i < k; ++i) out.j.middleCols(i * sys.w_dim(), sys.w_dim()) = out.ebar[i];
  out.j.rightCols(sys.v_dim()) = sys.F;
  return out;
}

void TestSuite::validate(const LtiSystem& sys) const {
  for (const TestCase& c : cases) {
    require_dims(c.inputs.rows() == c.outputs.rows(), "TestSuite: input and output sequences differ in length");
    require_dims(c.inputs.cols() == sys.inputs() || c.inputs.rows() == 0, "TestSuite: input width does not match system");
    require_dims(c.outputs.cols() == sys.outputs() || c.outputs.rows() == 0, "TestSuite: output width does not match system");
    require_dims(c.initial_state.size() == sys.states(), "TestSuite: initial state size does not match system");
    require_dims(c.states.size() == 0 || (c.states.rows() == c.outputs.rows() && c.states.cols() == sys.states()),
                 "TestSuite: state sequence shape");
  }
  if (sys.sample_time && !cases.empty()) {
    require_dims(std::abs(*sys.sample_time - sample_time) < 1e-12, "TestSuite: sample time does not match system");
  }
}

double spectral_radius(const Mat& a) {
  if (a.size() == 0) return 0.0;
  return a.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace reachsynth
