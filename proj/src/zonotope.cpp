#include "reachsynth/zonotope.hpp"
#include "reachsynth/lp.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace reachsynth {

// ---- Interval ---------------------------------------------------------------

Interval::Interval(Vec lo, Vec hi) : lower(std::move(lo)), upper(std::move(hi)) {
  require_dims(lower.size() == upper.size(), "Interval: bound sizes differ");
  for (Index i = 0; i < lower.size(); ++i) {
    if (!(lower[i] <= upper[i])) throw std::invalid_argument("Interval: lower > upper");
  }
}

Interval Interval::symmetric(const Vec& half_width) { return Interval(-half_width, half_width); }

bool Interval::contains(const Interval& other, double tol) const {
  require_dims(other.dim() == dim(), "Interval::contains: dimension mismatch");
  return ((other.lower - lower).array() >= -tol).all() && ((upper - other.upper).array() >= -tol).all();
}

bool Interval::contains_point(const Vec& x, double tol) const {
  require_dims(x.size() == dim(), "Interval::contains_point: dimension mismatch");
  return ((x - lower).array() >= -tol).all() && ((upper - x).array() >= -tol).all();
}

// ---- Polytope ---------------------------------------------------------------

Polytope::Polytope(Mat n, Vec d) : normals(std::move(n)), offsets(std::move(d)) {
  require_dims(normals.rows() == offsets.size(), "Polytope: normals/offsets row count");
}

Polytope Polytope::from_interval(const Interval& box) {
  const Index n = box.dim();
  Mat normals(2 * n, n);
  normals << Mat::Identity(n, n), -Mat::Identity(n, n);
  Vec offsets(2 * n);
  offsets << box.upper, -box.lower;
  return Polytope(normals, offsets);
}

bool Polytope::contains_point(const Vec& x, double tol) const {
  if (num_constraints() == 0) return true;
  return margin(x) <= tol;
}

double Polytope::margin(const Vec& x) const {
  require_dims(x.size() == dim(), "Polytope::margin: dimension mismatch");
  if (num_constraints() == 0) return -kInf;
  return (normals * x - offsets).maxCoeff();
}

// ---- Zonotope ---------------------------------------------------------------

Zonotope::Zonotope(Vec center) : center_(std::move(center)), template_(center_.size(), 0), scales_(0) {}

Zonotope::Zonotope(Vec center, Mat generators)
    : center_(std::move(center)), template_(std::move(generators)) {
  require_dims(template_.rows() == center_.size() || template_.cols() == 0,
               "Zonotope: generator rows must match center size");
  if (template_.cols() == 0) template_.resize(center_.size(), 0);
  scales_ = Vec::Ones(template_.cols());
}

Zonotope::Zonotope(Vec center, Mat template_generators, Vec scales)
    : center_(std::move(center)), template_(std::move(template_generators)), scales_(std::move(scales)) {
  if (template_.cols() == 0) template_.resize(center_.size(), 0);
  require_dims(template_.rows() == center_.size(), "Zonotope: generator rows must match center size");
  require_dims(template_.cols() == scales_.size(), "Zonotope: one scale per generator required");
  for (Index h = 0; h < scales_.size(); ++h) {
    if (!(scales_[h] >= 0.0)) throw std::invalid_argument("Zonotope: scales must be non-negative");
  }
}

Zonotope Zonotope::from_interval(const Interval& box) {
  return Zonotope(box.center(), Mat(box.radius().asDiagonal()));
}

Zonotope Zonotope::box(const Vec& half_width) { return Zonotope(Vec::Zero(half_width.size()), Mat(half_width.asDiagonal())); }

Mat Zonotope::generators() const { return template_ * scales_.asDiagonal(); }

Zonotope Zonotope::compact() const {
  const Mat g = generators();
  std::vector<Index> keep;
  for (Index h = 0; h < g.cols(); ++h) {
    if (g.col(h).cwiseAbs().maxCoeff() > 0.0) keep.push_back(h);
  }
  Mat t(dim(), static_cast<Index>(keep.size()));
  Vec s(static_cast<Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) {
    t.col(static_cast<Index>(i)) = template_.col(keep[i]);
    s[static_cast<Index>(i)] = scales_[keep[i]];
  }
  return Zonotope(center_, t, s);
}

Zonotope Zonotope::with_scales(Vec scales) const { return Zonotope(center_, template_, std::move(scales)); }

Zonotope Zonotope::with_center(Vec center) const {
  require_dims(center.size() == dim(), "Zonotope::with_center: dimension mismatch");
  return Zonotope(std::move(center), template_, scales_);
}

Zonotope minkowski_sum(const Zonotope& a, const Zonotope& b) {
  require_dims(a.dim() == b.dim(), "minkowski_sum: dimension mismatch");
  Mat t(a.dim(), a.num_generators() + b.num_generators());
  t << a.template_generators(), b.template_generators();
  Vec s(a.num_generators() + b.num_generators());
  s << a.scales(), b.scales();
  return Zonotope(a.center() + b.center(), t, s);
}

Zonotope linear_map(const Mat& m, const Zonotope& z) {
  require_dims(m.cols() == z.dim(), "linear_map: matrix columns must equal zonotope dimension");
  return Zonotope(m * z.center(), m * z.template_generators(), z.scales());
}

Zonotope translate(const Zonotope& z, const Vec& offset) {
  require_dims(offset.size() == z.dim(), "translate: dimension mismatch");
  return z.with_center(z.center() + offset);
}

Zonotope cartesian_product(const Zonotope& a, const Zonotope& b) {
  const Index n = a.dim() + b.dim();
  Vec c(n);
  c << a.center(), b.center();
  Mat t = Mat::Zero(n, a.num_generators() + b.num_generators());
  t.topLeftCorner(a.dim(), a.num_generators()) = a.template_generators();
  t.bottomRightCorner(b.dim(), b.num_generators()) = b.template_generators();
  Vec s(a.num_generators() + b.num_generators());
  s << a.scales(), b.scales();
  return Zonotope(c, t, s);
}

Interval interval_hull(const Zonotope& z) {
  const Vec dg = z.generators().cwiseAbs().rowwise().sum();
  return Interval(z.center() - dg, z.center() + dg);
}

double side_length_sum(const Interval& hull) { return (hull.upper - hull.lower).sum(); }

double side_length_sum(const Zonotope& z) { return 2.0 * znorm(z); }

double znorm(const Zonotope& z) { return z.generators().cwiseAbs().sum(); }

double support(const Zonotope& z, const Vec& direction) {
  require_dims(direction.size() == z.dim(), "support: dimension mismatch");
  return direction.dot(z.center()) + (direction.transpose() * z.generators()).cwiseAbs().sum();
}

// ---- facets -----------------------------------------------------------------

Vec cross_nx(const Mat& h) {
  const Index n = h.rows();
  require_dims(n >= 1 && h.cols() == n - 1, "cross_nx: expected an n x (n-1) matrix");
  Vec out(n);
  if (n == 1) {
    out[0] = 1.0;
    return out;
  }
  Mat minor(n - 1, n - 1);
  for (Index j = 0; j < n; ++j) {
    Index r = 0;
    for (Index i = 0; i < n; ++i) {
      if (i == j) continue;
      minor.row(r++) = h.row(i);
    }
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;  // (-1)^{j+1} with 1-based j
    out[j] = sign * minor.determinant();
  }
  return out;
}

namespace {

constexpr double kCrossEps = 1e-12;
constexpr double kDedupTol = 1e-10;

// Unit columns, zero columns dropped.
Mat unit_columns(const Mat& g) {
  std::vector<Index> keep;
  for (Index h = 0; h < g.cols(); ++h) {
    if (g.col(h).norm() > kCrossEps) keep.push_back(h);
  }
  Mat out(g.rows(), static_cast<Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) {
    out.col(static_cast<Index>(i)) = g.col(keep[i]) / g.col(keep[i]).norm();
  }
  return out;
}

void canonical_sign(Eigen::Ref<Vec> v) {
  for (Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 1e-12) {
      if (v[i] < 0) v = -v;
      return;
    }
  }
}

Mat dedupe_rows(std::vector<Vec> rows, Index n) {
  std::sort(rows.begin(), rows.end(), [](const Vec& a, const Vec& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
  });
  std::vector<Vec> kept;
  for (auto& r : rows) {
    bool dup = false;
    // Near-equal rows sort next to each other except across sign-of-rounding
    // boundaries; a missed duplicate only costs a redundant halfspace.
    for (auto it = kept.rbegin(); it != kept.rend() && it - kept.rbegin() < 4; ++it) {
      if ((*it - r).cwiseAbs().maxCoeff() < kDedupTol) {
        dup = true;
        break;
      }
    }
    if (!dup) kept.push_back(std::move(r));
  }
  Mat out(static_cast<Index>(kept.size()), n);
  for (std::size_t i = 0; i < kept.size(); ++i) out.row(static_cast<Index>(i)) = kept[i].transpose();
  return out;
}

// Facet normals of a full-rank generator set (unit columns), rows of the result.
Mat full_rank_normals(const Mat& g) {
  const Index n = g.rows();
  const Index p = g.cols();
  if (n == 1) return Mat::Ones(1, 1);
  std::vector<Vec> rows;
  if (n == 2) {
    for (Index h = 0; h < p; ++h) {
      Vec v(2);
      v << g(1, h), -g(0, h);
      canonical_sign(v);
      rows.push_back(v);
    }
    return dedupe_rows(std::move(rows), n);
  }
  const Index k = n - 1;
  std::vector<Index> idx(k);
  std::iota(idx.begin(), idx.end(), Index{0});
  Mat h(n, k);
  for (;;) {
    for (Index j = 0; j < k; ++j) h.col(j) = g.col(idx[j]);
    Vec v = cross_nx(h);
    const double norm = v.norm();
    if (norm > kCrossEps) {
      v /= norm;
      canonical_sign(v);
      rows.push_back(v);
    }
    Index pos = k - 1;
    while (pos >= 0 && idx[pos] == p - k + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (Index j = pos + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return dedupe_rows(std::move(rows), n);
}

}  // namespace

Mat facet_normals(const Mat& generators) {
  const Index n = generators.rows();
  require_dims(n >= 1, "facet_normals: empty ambient space");
  if (n > 4) throw DimensionError("facet_normals: halfspace conversion supports dimension <= 4");
  const Mat g = unit_columns(generators);
  if (g.cols() == 0) return Mat::Identity(n, n);

  Eigen::JacobiSVD<Mat> svd(g, Eigen::ComputeFullU);
  const Vec& sv = svd.singularValues();
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > 1e-10 * std::max(1.0, sv[0])) ++rank;
  }
  if (rank == n) return full_rank_normals(g);

  // Lower-dimensional zonotope: facets inside the span plus the complement directions.
  const Mat basis = svd.matrixU().leftCols(rank);
  const Mat inner = full_rank_normals(unit_columns(basis.transpose() * g));
  std::vector<Vec> rows;
  for (Index i = 0; i < inner.rows(); ++i) {
    Vec v = basis * inner.row(i).transpose();
    v.normalize();
    canonical_sign(v);
    rows.push_back(v);
  }
  for (Index i = rank; i < n; ++i) {
    Vec v = svd.matrixU().col(i);
    canonical_sign(v);
    rows.push_back(v);
  }
  return dedupe_rows(std::move(rows), n);
}

Polytope halfspace_rep(const Zonotope& z) {
  const Mat g = z.generators();
  const Mat np = facet_normals(g);
  const Vec nc = np * z.center();
  const Vec dd = (np * g).cwiseAbs().rowwise().sum();
  const Index f = np.rows();
  Mat normals(2 * f, z.dim());
  normals << np, -np;
  Vec offsets(2 * f);
  offsets << nc + dd, -nc + dd;
  return Polytope(normals, offsets);
}

bool contains_point_halfspace(const Zonotope& z, const Vec& x, double tol) {
  require_dims(x.size() == z.dim(), "contains_point: dimension mismatch");
  return halfspace_rep(z).contains_point(x, tol);
}

bool contains_point_lp(const Zonotope& z, const Vec& x, double tol) {
  require_dims(x.size() == z.dim(), "contains_point: dimension mismatch");
  const Zonotope zc = z.compact();
  const Index n = zc.dim();
  const Index p = zc.num_generators();
  const Mat g = zc.generators();
  const Vec r = x - zc.center();
  if (p == 0) return r.cwiseAbs().sum() <= tol;
  // variables [beta (p), s (n)];  s >= +-(g beta - r)
  LinearProgram lp;
  lp.cost = Vec::Zero(p + n);
  lp.cost.tail(n).setOnes();
  lp.a = Mat::Zero(2 * n, p + n);
  lp.a.topLeftCorner(n, p) = -g;
  lp.a.topRightCorner(n, n) = Mat::Identity(n, n);
  lp.a.bottomLeftCorner(n, p) = g;
  lp.a.bottomRightCorner(n, n) = Mat::Identity(n, n);
  lp.b.resize(2 * n);
  lp.b << -r, r;
  lp.lower = Vec::Zero(p + n);
  lp.lower.head(p).setConstant(-1.0);
  lp.upper = Vec::Constant(p + n, kInf);
  lp.upper.head(p).setConstant(1.0);
  const LpSolution sol = solve_lp(lp);
  return sol.optimal() && sol.cost <= tol;
}

bool contains_point(const Zonotope& z, const Vec& x, double tol) {
  if (z.dim() <= 3) return contains_point_halfspace(z, x, tol);
  return contains_point_lp(z, x, tol);
}

double containment_margin(const Zonotope& z, const Polytope& p) {
  require_dims(p.dim() == z.dim() || p.num_constraints() == 0, "zonotope_in_polytope: dimension mismatch");
  if (p.num_constraints() == 0) return -kInf;
  const Vec reach = p.normals * z.center() + (p.normals * z.generators()).cwiseAbs().rowwise().sum();
  return (reach - p.offsets).maxCoeff();
}

bool zonotope_in_polytope(const Zonotope& z, const Polytope& p, double tol) {
  return containment_margin(z, p) <= tol;
}

std::vector<Vec> vertices_2d(const Zonotope& z) {
  require_dims(z.dim() == 2, "vertices_2d: zonotope must be 2-D");
  const Mat g0 = z.generators();
  std::vector<Vec> gens;
  for (Index h = 0; h < g0.cols(); ++h) {
    Vec v = g0.col(h);
    if (v.norm() <= 0.0) continue;
    if (v[1] < 0 || (v[1] == 0 && v[0] < 0)) v = -v;
    gens.push_back(v);
  }
  if (gens.empty()) return {z.center()};
  std::sort(gens.begin(), gens.end(), [](const Vec& a, const Vec& b) {
    return std::atan2(a[1], a[0]) < std::atan2(b[1], b[0]);
  });
  Vec start = z.center();
  for (const auto& v : gens) start -= v;  // lowest point (ties broken to the left)
  std::vector<Vec> verts;
  Vec cur = start;
  for (const auto& v : gens) {
    verts.push_back(cur);
    cur += 2.0 * v;
  }
  for (const auto& v : gens) {
    verts.push_back(cur);
    cur -= 2.0 * v;
  }
  return verts;
}

}  // namespace reachsynth
