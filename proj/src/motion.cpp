#include "skyblendr/motion.hpp"

#include <algorithm>
#include <vector>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace skyblendr {

void MotionParams::validate() const {
  if (max_features < 1 || pyramid_levels < 1 || lk_window < 3 || lk_iterations < 1 || ransac_iterations < 1 ||
      min_matches < 2) {
    throw std::invalid_argument("motion parameters must be positive (window >= 3, min_matches >= 2)");
  }
  if (!(lk_epsilon > 0.0) || !(kde_bandwidth > 0.0) || !(ransac_tolerance > 0.0) || !(lk_min_eigenvalue > 0.0)) {
    throw std::invalid_argument("motion tolerances and bandwidth must be positive");
  }
  if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("eta must lie in (0, 1)");
}

// --- Feature detection -------------------------------------------------------

std::vector<FeaturePoint> detect_sky_features(const GrayImage& gray, const Matte& matte, const MotionParams& params) {
  if (!gray.same_size(matte)) throw std::invalid_argument("feature detection needs gray and matte of equal size");
  const int w = gray.width();
  const int h = gray.height();
  constexpr int kMargin = 2;
  if (w <= 2 * kMargin || h <= 2 * kMargin) return {};

  // Gradient products (gx^2, gx*gy, gy^2), then their 3x3 sums done separably.
  const auto g = gray.values();
  thread_local std::vector<double> products, row_sums;
  products.resize(3 * static_cast<std::size_t>(w) * h);
  row_sums.resize(products.size());
  for (int y = 0; y < h; ++y) {
    const double* above = g.data() + static_cast<std::size_t>(std::max(y - 1, 0)) * w;
    const double* here = g.data() + static_cast<std::size_t>(y) * w;
    const double* below = g.data() + static_cast<std::size_t>(std::min(y + 1, h - 1)) * w;
    double* out = products.data() + 3 * static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w; ++x) {
      const int xm = x == 0 ? 0 : x - 1;
      const int xp = x == w - 1 ? w - 1 : x + 1;
      const double gx = 0.5 * (here[xp] - here[xm]);
      const double gy = 0.5 * (below[x] - above[x]);
      out[3 * x] = gx * gx;
      out[3 * x + 1] = gx * gy;
      out[3 * x + 2] = gy * gy;
    }
  }
  for (int y = 0; y < h; ++y) {
    const double* in = products.data() + 3 * static_cast<std::size_t>(y) * w;
    double* out = row_sums.data() + 3 * static_cast<std::size_t>(y) * w;
    for (int x = 1; x < w - 1; ++x)
      for (int k = 0; k < 3; ++k) out[3 * x + k] = in[3 * (x - 1) + k] + in[3 * x + k] + in[3 * (x + 1) + k];
  }

  GrayImage score(w, h);
  auto sc = score.values();
  const auto m = matte.values();
  double max_score = 0.0;
  for (int y = kMargin; y < h - kMargin; ++y) {
    const double* r0 = row_sums.data() + 3 * static_cast<std::size_t>(y - 1) * w;
    const double* r1 = r0 + 3 * static_cast<std::size_t>(w);
    const double* r2 = r1 + 3 * static_cast<std::size_t>(w);
    const std::size_t row = static_cast<std::size_t>(y) * w;
    for (int x = kMargin; x < w - kMargin; ++x) {
      if (!(m[row + x] > params.sky_mask_threshold)) continue;
      const double gxx = r0[3 * x] + r1[3 * x] + r2[3 * x];
      const double gxy = r0[3 * x + 1] + r1[3 * x + 1] + r2[3 * x + 1];
      const double gyy = r0[3 * x + 2] + r1[3 * x + 2] + r2[3 * x + 2];
      const double half_trace = 0.5 * (gxx + gyy);
      const double half_diff = 0.5 * (gxx - gyy);
      const double min_eig = half_trace - std::sqrt(half_diff * half_diff + gxy * gxy);
      sc[row + x] = min_eig;
      max_score = std::max(max_score, min_eig);
    }
  }
  constexpr double kAbsoluteFloor = 1e-10;
  if (max_score <= kAbsoluteFloor) return {};
  const double threshold = std::max(params.corner_quality * max_score, kAbsoluteFloor);

  std::vector<FeaturePoint> candidates;
  for (int y = kMargin; y < h - kMargin; ++y) {
    for (int x = kMargin; x < w - kMargin; ++x) {
      const double s = score.at(x, y);
      if (s <= threshold) continue;
      bool local_max = true;
      for (int dy = -1; dy <= 1 && local_max; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (score.at(x + dx, y + dy) > s) {
            local_max = false;
            break;
          }
        }
      }
      if (local_max) candidates.push_back({static_cast<double>(x), static_cast<double>(y), s});
    }
  }
  // Candidates are generated in raster order; a stable sort keeps ties deterministic.
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const FeaturePoint& a, const FeaturePoint& b) { return a.score > b.score; });

  const double spacing = params.min_feature_spacing;
  const double spacing_sq = spacing * spacing;
  const int cell = std::max(1, static_cast<int>(std::ceil(spacing)));
  const int grid_w = (w + cell - 1) / cell;
  const int grid_h = (h + cell - 1) / cell;
  std::vector<std::vector<Point2>> grid(static_cast<std::size_t>(grid_w) * grid_h);

  std::vector<FeaturePoint> kept;
  for (const FeaturePoint& c : candidates) {
    if (static_cast<int>(kept.size()) >= params.max_features) break;
    const int gx = static_cast<int>(c.x) / cell;
    const int gy = static_cast<int>(c.y) / cell;
    bool too_close = false;
    for (int ny = std::max(gy - 1, 0); ny <= std::min(gy + 1, grid_h - 1) && !too_close; ++ny) {
      for (int nx = std::max(gx - 1, 0); nx <= std::min(gx + 1, grid_w - 1) && !too_close; ++nx) {
        for (const Point2& p : grid[static_cast<std::size_t>(ny) * grid_w + nx]) {
          const double dx = p.x - c.x;
          const double dy = p.y - c.y;
          if (dx * dx + dy * dy < spacing_sq) {
            too_close = true;
            break;
          }
        }
      }
    }
    if (too_close) continue;
    grid[static_cast<std::size_t>(gy) * grid_w + gx].push_back({c.x, c.y});
    kept.push_back(c);
  }
  return kept;
}

// --- Lucas-Kanade ----------------------------------------------------------

namespace {

// Samples an n x n patch whose top-left sample sits at (x0, y0); all samples
// share the same bilinear weights. Out-of-range taps clamp to the border.
void sample_patch(const GrayImage& img, double x0, double y0, int n, std::vector<double>& out) {
  out.resize(static_cast<std::size_t>(n) * n);
  const double fx0 = std::floor(x0);
  const double fy0 = std::floor(y0);
  const double fx = x0 - fx0;
  const double fy = y0 - fy0;
  const double w00 = (1.0 - fx) * (1.0 - fy);
  const double w10 = fx * (1.0 - fy);
  const double w01 = (1.0 - fx) * fy;
  const double w11 = fx * fy;
  const int ix = static_cast<int>(fx0);
  const int iy = static_cast<int>(fy0);
  const int w = img.width();
  const int h = img.height();

  if (ix >= 0 && iy >= 0 && ix + n < w && iy + n < h) {
    for (int j = 0; j < n; ++j) {
      auto r0 = img.row(iy + j);
      auto r1 = img.row(iy + j + 1);
      double* dst = out.data() + static_cast<std::size_t>(j) * n;
      for (int i = 0; i < n; ++i) {
        const int c = ix + i;
        dst[i] = w00 * r0[c] + w10 * r0[c + 1] + w01 * r1[c] + w11 * r1[c + 1];
      }
    }
    return;
  }
  for (int j = 0; j < n; ++j) {
    const int y0i = std::clamp(iy + j, 0, h - 1);
    const int y1i = std::clamp(iy + j + 1, 0, h - 1);
    for (int i = 0; i < n; ++i) {
      const int x0i = std::clamp(ix + i, 0, w - 1);
      const int x1i = std::clamp(ix + i + 1, 0, w - 1);
      out[static_cast<std::size_t>(j) * n + i] =
          w00 * img.at(x0i, y0i) + w10 * img.at(x1i, y0i) + w01 * img.at(x0i, y1i) + w11 * img.at(x1i, y1i);
    }
  }
}

}  // namespace

// The singularity threshold is expressed for 8-bit intensities.
constexpr double kEightBitSquared = 255.0 * 255.0;

std::vector<PointMatch> track_lk(const ImagePyramid& prev, const ImagePyramid& curr,
                                 std::span<const FeaturePoint> points, const MotionParams& params) {
  if (prev.size() == 0 || curr.size() == 0) throw std::invalid_argument("track_lk needs non-empty pyramids");
  if (!prev.levels[0].same_size(curr.levels[0])) {
    throw std::invalid_argument("track_lk needs pyramids built from same-size frames");
  }
  const int levels = static_cast<int>(std::min(prev.size(), curr.size()));
  const int half = params.lk_window / 2;
  const int n = 2 * half + 1;
  const int padded = n + 2;
  const double count = static_cast<double>(n) * n;
  const int full_w = prev.levels[0].width();
  const int full_h = prev.levels[0].height();

  std::vector<double> prev_patch, curr_patch, grad_x(n * n), grad_y(n * n), templ(n * n);
  std::vector<PointMatch> matches;
  matches.reserve(points.size());

  for (const FeaturePoint& pt : points) {
    double gx = 0.0, gy = 0.0;  // guess carried between levels
    double vx = 0.0, vy = 0.0;
    bool ok = true;
    for (int level = levels - 1; level >= 0 && ok; --level) {
      const GrayImage& pimg = prev.levels[level];
      const GrayImage& cimg = curr.levels[level];
      const double scale = std::ldexp(1.0, -level);
      const double ux = pt.x * scale;
      const double uy = pt.y * scale;

      // Template and central-difference gradients from a one-pixel padded patch.
      sample_patch(pimg, ux - half - 1, uy - half - 1, padded, prev_patch);
      double gxx = 0.0, gxy = 0.0, gyy = 0.0;
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
          const int c = (j + 1) * padded + (i + 1);
          const double dx = 0.5 * (prev_patch[c + 1] - prev_patch[c - 1]);
          const double dy = 0.5 * (prev_patch[c + padded] - prev_patch[c - padded]);
          const int k = j * n + i;
          grad_x[k] = dx;
          grad_y[k] = dy;
          templ[k] = prev_patch[c];
          gxx += dx * dx;
          gxy += dx * dy;
          gyy += dy * dy;
        }
      }
      const double half_trace = 0.5 * (gxx + gyy) / count;
      const double half_diff = 0.5 * (gxx - gyy) / count;
      const double min_eig = half_trace - std::sqrt(half_diff * half_diff + (gxy / count) * (gxy / count));
      if (!(min_eig * kEightBitSquared >= params.lk_min_eigenvalue)) {
        ok = false;
        break;
      }
      const double det = gxx * gyy - gxy * gxy;

      vx = vy = 0.0;
      for (int iter = 0; iter < params.lk_iterations; ++iter) {
        sample_patch(cimg, ux + gx + vx - half, uy + gy + vy - half, n, curr_patch);
        double bx = 0.0, by = 0.0;
        for (int k = 0; k < n * n; ++k) {
          const double diff = templ[k] - curr_patch[k];
          bx += diff * grad_x[k];
          by += diff * grad_y[k];
        }
        const double step_x = (gyy * bx - gxy * by) / det;
        const double step_y = (gxx * by - gxy * bx) / det;
        vx += step_x;
        vy += step_y;
        if (!std::isfinite(vx) || !std::isfinite(vy)) {
          ok = false;
          break;
        }
        if (std::hypot(step_x, step_y) < params.lk_epsilon) break;
      }
      if (level > 0) {
        gx = 2.0 * (gx + vx);
        gy = 2.0 * (gy + vy);
      }
    }
    if (!ok) continue;

    const Point2 end{pt.x + gx + vx, pt.y + gy + vy};
    if (end.x - half < 0.0 || end.y - half < 0.0 || end.x + half > full_w - 1 || end.y + half > full_h - 1) continue;
    matches.push_back({{pt.x, pt.y}, end});
  }
  return matches;
}

// --- KDE filter --------------------------------------------------------------

std::vector<PointMatch> filter_matches_kde(std::span<const PointMatch> matches, const MotionParams& params) {
  if (matches.size() < 2) return {matches.begin(), matches.end()};
  const std::size_t n = matches.size();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = matches[i].distance();

  // The Gaussian normalization constant cancels against the max-normalization.
  const double inv_two_h2 = 1.0 / (2.0 * params.kde_bandwidth * params.kde_bandwidth);
  std::vector<double> density(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double u = d[i] - d[j];
      sum += std::exp(-u * u * inv_two_h2);
    }
    density[i] = sum;
  }
  const double peak = *std::max_element(density.begin(), density.end());

  std::vector<PointMatch> kept;
  kept.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (density[i] / peak >= params.eta) kept.push_back(matches[i]);
  }
  return kept;
}

// --- Similarity fitting ------------------------------------------------------

SimilarityTransform fit_similarity(std::span<const PointMatch> pairs) {
  if (pairs.size() < 2) {
    throw DegenerateInputError("similarity fit needs at least 2 point pairs, got " + std::to_string(pairs.size()));
  }
  const double n = static_cast<double>(pairs.size());
  double px = 0.0, py = 0.0, qx = 0.0, qy = 0.0;
  for (const PointMatch& m : pairs) {
    px += m.prev.x;
    py += m.prev.y;
    qx += m.curr.x;
    qy += m.curr.y;
  }
  px /= n;
  py /= n;
  qx /= n;
  qy /= n;

  double spread = 0.0, dot = 0.0, cross = 0.0;
  for (const PointMatch& m : pairs) {
    const double ax = m.prev.x - px;
    const double ay = m.prev.y - py;
    const double bx = m.curr.x - qx;
    const double by = m.curr.y - qy;
    spread += ax * ax + ay * ay;
    dot += ax * bx + ay * by;
    cross += ax * by - ay * bx;
  }
  if (!(spread > 1e-12 * n)) throw DegenerateInputError("similarity fit: all source points coincide");
  const double a = dot / spread;
  const double b = cross / spread;
  if (a == 0.0 && b == 0.0) throw DegenerateInputError("similarity fit collapsed to zero scale");
  return SimilarityTransform::from_linear(a, b, qx - (a * px - b * py), qy - (b * px + a * py));
}

MotionEstimate estimate_motion_ransac(std::span<const PointMatch> matches, const MotionParams& params) {
  const std::size_t n = matches.size();
  if (n < static_cast<std::size_t>(std::max(params.min_matches, 2))) return {};

  // Raw mt19937_64 output with modulo reduction keeps sampling identical across
  // standard library implementations.
  std::mt19937_64 rng(params.rng_seed);
  const double tol_sq = params.ransac_tolerance * params.ransac_tolerance;

  auto count_inliers = [&](const SimilarityTransform& m, std::vector<std::size_t>* out) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const Point2 p = m.apply(matches[i].prev);
      const double dx = p.x - matches[i].curr.x;
      const double dy = p.y - matches[i].curr.y;
      if (dx * dx + dy * dy < tol_sq) {
        ++count;
        if (out) out->push_back(i);
      }
    }
    return count;
  };

  std::size_t best_count = 0;
  SimilarityTransform best_model;
  for (int iter = 0; iter < params.ransac_iterations; ++iter) {
    const std::size_t i = rng() % n;
    std::size_t j = rng() % (n - 1);
    if (j >= i) ++j;
    const PointMatch sample[2] = {matches[i], matches[j]};
    if (distance(sample[0].prev, sample[1].prev) < 1e-9) continue;
    SimilarityTransform model;
    try {
      model = fit_similarity(sample);
    } catch (const DegenerateInputError&) {
      continue;
    }
    const std::size_t count = count_inliers(model, nullptr);
    if (count > best_count) {
      best_count = count;
      best_model = model;
      if (best_count == n) break;
    }
  }
  if (best_count < 2) return {};

  std::vector<std::size_t> inliers;
  count_inliers(best_model, &inliers);
  std::vector<PointMatch> consensus;
  consensus.reserve(inliers.size());
  for (std::size_t idx : inliers) consensus.push_back(matches[idx]);
  try {
    return {fit_similarity(consensus), static_cast<int>(consensus.size())};
  } catch (const DegenerateInputError&) {
    return {best_model, static_cast<int>(consensus.size())};
  }
}

SimilarityTransform accumulate_motion(std::span<const SimilarityTransform> history, const SimilarityTransform& crop) {
  SimilarityTransform product;
  for (const SimilarityTransform& step : history) product = step * product;
  return crop * product;
}

}  // namespace skyblendr
