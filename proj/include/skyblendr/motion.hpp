#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "skyblendr/geometry.hpp"
#include "skyblendr/imaging.hpp"

namespace skyblendr {

struct FeaturePoint {
  double x = 0.0;
  double y = 0.0;
  double score = 0.0;
};

struct PointMatch {
  Point2 prev;
  Point2 curr;

  /// Euclidean displacement, always recomputed from the endpoints.
  double distance() const { return skyblendr::distance(prev, curr); }
};

struct MotionParams {
  int max_features = 200;
  int pyramid_levels = 3;
  int lk_window = 21;
  int lk_iterations = 30;
  double lk_epsilon = 0.01;
  double lk_min_eigenvalue = 1e-4;  // window-averaged, in 8-bit intensity units squared
  double kde_bandwidth = 0.5;
  double eta = 0.1;
  int ransac_iterations = 500;
  double ransac_tolerance = 2.0;
  int min_matches = 8;
  std::uint64_t rng_seed = 0;

  // Feature selection.
  double sky_mask_threshold = 0.9;
  double min_feature_spacing = 8.0;
  double corner_quality = 0.01;

  void validate() const;
};

class DegenerateInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shi-Tomasi corners (3x3 structure tensor, minimum eigenvalue) restricted to
/// pixels where matte > sky_mask_threshold, thinned by greedy non-maximum
/// suppression with min_feature_spacing, strongest first, capped at max_features.
std::vector<FeaturePoint> detect_sky_features(const GrayImage& gray, const Matte& matte, const MotionParams& params);

/// Coarse-to-fine iterative Lucas-Kanade. Points on near-singular windows or
/// whose final window leaves the image are dropped.
std::vector<PointMatch> track_lk(const ImagePyramid& prev, const ImagePyramid& curr,
                                 std::span<const FeaturePoint> points, const MotionParams& params);

/// Gaussian KDE over match distances. Each match's density is normalized by
/// the largest density among the matches; matches below eta are dropped.
/// Fewer than two matches are returned unchanged.
std::vector<PointMatch> filter_matches_kde(std::span<const PointMatch> matches, const MotionParams& params);

/// Least-squares similarity mapping prev -> curr. Throws DegenerateInputError
/// for fewer than two pairs or coincident prev points.
SimilarityTransform fit_similarity(std::span<const PointMatch> pairs);

struct MotionEstimate {
  SimilarityTransform transform;
  int inlier_count = 0;
};

/// RANSAC over 2-point minimal samples followed by a least-squares refit on the
/// best consensus set. Below min_matches (or with no usable sample) returns the
/// identity with inlier_count 0. Deterministic for a given rng_seed.
MotionEstimate estimate_motion_ransac(std::span<const PointMatch> matches, const MotionParams& params);

/// crop * history[t-1] * ... * history[0].
SimilarityTransform accumulate_motion(std::span<const SimilarityTransform> history, const SimilarityTransform& crop);

}  // namespace skyblendr
