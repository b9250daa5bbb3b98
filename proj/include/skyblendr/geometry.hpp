#pragma once

#include <array>
#include <cmath>

namespace skyblendr {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

inline double distance(const Point2& a, const Point2& b) {
  return std::hypot(b.x - a.x, b.y - a.y);
}

using Matrix3 = std::array<double, 9>;

/// 2D similarity (translation + rotation + uniform scale) in homogeneous form:
///
///     [ a  -b  tx ]
///     [ b   a  ty ]      with a = s cos(theta), b = s sin(theta), s > 0
///     [ 0   0   1 ]
///
/// Stored as (a, b, tx, ty) so the 4-DoF structure holds by construction.
/// Composition and inversion stay inside the family.
class SimilarityTransform {
 public:
  /// Identity.
  SimilarityTransform() = default;

  /// Throws std::invalid_argument when scale <= 0 or any value is non-finite.
  static SimilarityTransform from_params(double scale, double rotation, double tx, double ty);

  /// Direct (a, b) parameterization; rejects a = b = 0.
  static SimilarityTransform from_linear(double a, double b, double tx, double ty);

  static SimilarityTransform translation(double tx, double ty) { return from_linear(1.0, 0.0, tx, ty); }

  /// Validates the s*R block structure and the [0 0 1] last row to `tolerance`.
  static SimilarityTransform from_matrix(const Matrix3& m, double tolerance = 1e-9);

  double a() const { return a_; }
  double b() const { return b_; }
  double scale() const { return std::hypot(a_, b_); }
  double rotation() const { return std::atan2(b_, a_); }
  double tx() const { return tx_; }
  double ty() const { return ty_; }

  Matrix3 matrix() const { return {a_, -b_, tx_, b_, a_, ty_, 0.0, 0.0, 1.0}; }

  Point2 apply(const Point2& p) const { return {a_ * p.x - b_ * p.y + tx_, b_ * p.x + a_ * p.y + ty_}; }

  SimilarityTransform inverse() const;

  /// Matrix product: (lhs * rhs).apply(p) == lhs.apply(rhs.apply(p)).
  friend SimilarityTransform operator*(const SimilarityTransform& lhs, const SimilarityTransform& rhs);

  friend bool operator==(const SimilarityTransform&, const SimilarityTransform&) = default;

 private:
  SimilarityTransform(double a, double b, double tx, double ty) : a_(a), b_(b), tx_(tx), ty_(ty) {}

  double a_ = 1.0;
  double b_ = 0.0;
  double tx_ = 0.0;
  double ty_ = 0.0;
};

/// True when `m` has the similarity structure within `tolerance`.
bool is_similarity_matrix(const Matrix3& m, double tolerance = 1e-9);

}  // namespace skyblendr
