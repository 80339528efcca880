#pragma once

#include "reachsynth/common.hpp"

#include <vector>

namespace reachsynth {

/// Axis-aligned box [lower, upper].
struct Interval {
  Vec lower;
  Vec upper;

  Interval() = default;
  Interval(Vec lower, Vec upper);

  static Interval symmetric(const Vec& half_width);

  Index dim() const { return lower.size(); }
  Vec center() const { return 0.5 * (lower + upper); }
  Vec radius() const { return 0.5 * (upper - lower); }

  /// True if `other` lies inside this box inflated by `tol` in every direction.
  bool contains(const Interval& other, double tol = kContainmentTol) const;
  bool contains_point(const Vec& x, double tol = kContainmentTol) const;
};

/// Halfspace set {x : normals * x <= offsets}.
struct Polytope {
  Mat normals;
  Vec offsets;

  Polytope() = default;
  Polytope(Mat normals, Vec offsets);

  static Polytope from_interval(const Interval& box);

  Index dim() const { return normals.cols(); }
  Index num_constraints() const { return normals.rows(); }
  bool contains_point(const Vec& x, double tol = kContainmentTol) const;
  /// max_j (n_j . x - d_j); positive means x is outside.
  double margin(const Vec& x) const;
};

/**
 * Zonotope in scaled-template form.
 *
 * Z = { c + G' diag(alpha) beta : beta in [-1, 1]^p }.
 *
 * Keeping the template G' separate from the scales alpha lets identification
 * treat alpha as free variables while the facet directions of G' stay fixed.
 * Generators whose scale is zero are kept; compact() drops them.
 */
class Zonotope {
 public:
  Zonotope() = default;
  /// Point {center}.
  explicit Zonotope(Vec center);
  /// Unit scales.
  Zonotope(Vec center, Mat generators);
  Zonotope(Vec center, Mat template_generators, Vec scales);

  static Zonotope from_interval(const Interval& box);
  /// (0, diag(half_width)) with unit scales.
  static Zonotope box(const Vec& half_width);
  static Zonotope origin(Index dim) { return Zonotope(Vec::Zero(dim)); }

  Index dim() const { return center_.size(); }
  Index num_generators() const { return template_.cols(); }

  const Vec& center() const { return center_; }
  const Mat& template_generators() const { return template_; }
  const Vec& scales() const { return scales_; }

  /// Effective generator matrix G' diag(alpha).
  Mat generators() const;

  /// Same set without zero-scale or zero-length generators.
  Zonotope compact() const;

  Zonotope with_scales(Vec scales) const;
  Zonotope with_center(Vec center) const;

 private:
  Vec center_;
  Mat template_ = Mat(0, 0);
  Vec scales_;
};

Zonotope minkowski_sum(const Zonotope& a, const Zonotope& b);
Zonotope linear_map(const Mat& m, const Zonotope& z);
Zonotope translate(const Zonotope& z, const Vec& offset);
/// Z1 x Z2 with block-diagonal templates.
Zonotope cartesian_product(const Zonotope& a, const Zonotope& b);

Interval interval_hull(const Zonotope& z);
/// Sum of the half side lengths of the interval hull (1-norm of delta g).
double znorm(const Zonotope& z);
/// Sum of the full side lengths of the interval hull (2 * znorm).
double side_length_sum(const Interval& hull);
double side_length_sum(const Zonotope& z);
/// Support function max_{x in Z} direction . x.
double support(const Zonotope& z, const Vec& direction);

/// Generalized cross product of the n-1 columns of an n x (n-1) matrix.
Vec cross_nx(const Mat& h);

/**
 * Unit facet normals (one per +/- pair) of the zonotope spanned by the columns of
 * `generators`, deduplicated and sign-canonical.
 *
 * Selections whose cross product vanishes are skipped. If the generators do not
 * span the ambient space, facets are computed inside their span and the
 * orthogonal complement contributes equality directions.
 */
Mat facet_normals(const Mat& generators);

/// Exact halfspace representation N x <= d with N = [N+; -N+].
Polytope halfspace_rep(const Zonotope& z);

bool contains_point(const Zonotope& z, const Vec& x, double tol = kContainmentTol);
bool contains_point_halfspace(const Zonotope& z, const Vec& x, double tol = kContainmentTol);
/// Minimal l1 residual of c + G beta = x over beta in [-1,1]^p, tested against tol.
bool contains_point_lp(const Zonotope& z, const Vec& x, double tol = kContainmentTol);

/// Exact support-function test Z subset P.
bool zonotope_in_polytope(const Zonotope& z, const Polytope& p, double tol = kContainmentTol);
/// max_j (n_j . c + sum_h |n_j . g_h| - d_j).
double containment_margin(const Zonotope& z, const Polytope& p);

/// Vertices of a 2-D zonotope in counter-clockwise order (test and plotting helper).
std::vector<Vec> vertices_2d(const Zonotope& z);

}  // namespace reachsynth
