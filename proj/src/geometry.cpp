#include "skyblendr/geometry.hpp"

#include <stdexcept>
#include <string>

namespace skyblendr {

namespace {

bool all_finite(std::initializer_list<double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace

SimilarityTransform SimilarityTransform::from_params(double scale, double rotation, double tx, double ty) {
  if (!(scale > 0.0) || !all_finite({scale, rotation, tx, ty})) {
    throw std::invalid_argument("similarity scale must be positive and finite, got " + std::to_string(scale));
  }
  return SimilarityTransform(scale * std::cos(rotation), scale * std::sin(rotation), tx, ty);
}

SimilarityTransform SimilarityTransform::from_linear(double a, double b, double tx, double ty) {
  if (!all_finite({a, b, tx, ty})) throw std::invalid_argument("similarity parameters must be finite");
  if (a == 0.0 && b == 0.0) throw std::invalid_argument("similarity with zero scale is not invertible");
  return SimilarityTransform(a, b, tx, ty);
}

bool is_similarity_matrix(const Matrix3& m, double tolerance) {
  for (double v : m) {
    if (!std::isfinite(v)) return false;
  }
  const bool block = std::abs(m[0] - m[4]) <= tolerance && std::abs(m[1] + m[3]) <= tolerance;
  const bool last_row = std::abs(m[6]) <= tolerance && std::abs(m[7]) <= tolerance && std::abs(m[8] - 1.0) <= tolerance;
  const double det = m[0] * m[4] - m[1] * m[3];
  return block && last_row && det > 0.0;
}

SimilarityTransform SimilarityTransform::from_matrix(const Matrix3& m, double tolerance) {
  if (!is_similarity_matrix(m, tolerance)) {
    throw std::invalid_argument("matrix is not a similarity transform (expected s*R block and [0 0 1] last row)");
  }
  return SimilarityTransform(m[0], m[3], m[2], m[5]);
}

SimilarityTransform SimilarityTransform::inverse() const {
  const double norm = a_ * a_ + b_ * b_;
  const double ia = a_ / norm;
  const double ib = -b_ / norm;
  return SimilarityTransform(ia, ib, -(ia * tx_ - ib * ty_), -(ib * tx_ + ia * ty_));
}

SimilarityTransform operator*(const SimilarityTransform& lhs, const SimilarityTransform& rhs) {
  const double a = lhs.a_ * rhs.a_ - lhs.b_ * rhs.b_;
  const double b = lhs.b_ * rhs.a_ + lhs.a_ * rhs.b_;
  const Point2 t = lhs.apply({rhs.tx_, rhs.ty_});
  return SimilarityTransform(a, b, t.x, t.y);
}

}  // namespace skyblendr
