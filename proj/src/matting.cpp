#include "skyblendr/matting.hpp"

#include <stdexcept>
#include <vector>

#include "skyblendr/image_io.hpp"

namespace skyblendr {

void GuidedFilterParams::validate() const {
  if (radius < 1) throw std::invalid_argument("guided filter radius must be >= 1");
  if (!(epsilon > 0.0)) throw std::invalid_argument("guided filter epsilon must be > 0");
}

Size2 matting_input_size(int width, int height, int long_side) {
  if (long_side < 1) throw std::invalid_argument("matting long side must be >= 1");
  const int longest = std::max(width, height);
  if (longest <= long_side) return {width, height};
  const double scale = static_cast<double>(long_side) / longest;
  return {std::max(1, static_cast<int>(std::lround(width * scale))),
          std::max(1, static_cast<int>(std::lround(height * scale)))};
}

Matte estimate_coarse_matte(const Frame& frame_low, const CoarseMatteWeights& weights) {
  const int w = frame_low.width();
  const int h = frame_low.height();
  const GrayImage luma = to_gray(frame_low);
  Matte matte(w, h);

  auto lum = [&](int x, int y) { return luma.at(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1)); };

  for (int y = 0; y < h; ++y) {
    const double height_term = 1.0 - static_cast<double>(y) / h;
    auto px = frame_low.row(y);
    auto dst = matte.row(y);
    for (int x = 0; x < w; ++x) {
      const double gx = (lum(x + 1, y - 1) + 2.0 * lum(x + 1, y) + lum(x + 1, y + 1)) -
                        (lum(x - 1, y - 1) + 2.0 * lum(x - 1, y) + lum(x - 1, y + 1));
      const double gy = (lum(x - 1, y + 1) + 2.0 * lum(x, y + 1) + lum(x + 1, y + 1)) -
                        (lum(x - 1, y - 1) + 2.0 * lum(x, y - 1) + lum(x + 1, y - 1));
      const double gradient = std::sqrt(gx * gx + gy * gy);
      const double r = px[3 * x];
      const double g = px[3 * x + 1];
      const double b = px[3 * x + 2];
      const double blueness = b - std::max(r, g);
      const double score = weights.blue * blueness + weights.smooth * (1.0 - gradient) +
                           weights.height * height_term + weights.brightness * luma.at(x, y) + weights.bias;
      dst[x] = 1.0 / (1.0 + std::exp(-score));
    }
  }
  return matte;
}

Matte load_matte(const MatteFileSequence& source, int frame_index, int expected_w, int expected_h) {
  const std::filesystem::path path = source.directory / format_frame_path(source.pattern, frame_index);
  if (!std::filesystem::is_regular_file(path)) {
    throw std::runtime_error("matte for frame " + std::to_string(frame_index) + " not found: " + path.string());
  }
  Matte matte = read_single_channel(path).retag<MatteTag>();
  if (!matte.same_size(expected_w, expected_h)) matte = resize_bilinear(matte, expected_w, expected_h);
  return matte;
}

GrayImage guided_filter(const GrayImage& guide, const GrayImage& src, const GuidedFilterParams& params) {
  params.validate();
  if (!guide.same_size(src)) {
    throw std::invalid_argument("guided filter guide and source must have identical dimensions");
  }
  const int r = params.radius;
  const int w = guide.width();
  const int h = guide.height();
  const std::size_t n = guide.pixel_count();
  auto I = guide.values();
  auto p = src.values();

  // Scratch is kept per thread; fresh multi-megabyte buffers every frame cost
  // more in page faults than the filtering itself.
  thread_local std::vector<double> stats, means, coeffs, mean_coeffs;
  stats.resize(4 * n);
  means.resize(4 * n);
  coeffs.resize(2 * n);
  mean_coeffs.resize(2 * n);

  // Interleaved (I, p, I*I, I*p) so one pass yields all first-stage means.
  for (std::size_t i = 0; i < n; ++i) {
    stats[4 * i] = I[i];
    stats[4 * i + 1] = p[i];
    stats[4 * i + 2] = I[i] * I[i];
    stats[4 * i + 3] = I[i] * p[i];
  }
  box_mean_interleaved(std::span(stats).first(4 * n), w, h, 4, r, std::span(means).first(4 * n));

  for (std::size_t i = 0; i < n; ++i) {
    const double mi = means[4 * i];
    const double mp = means[4 * i + 1];
    const double var_i = means[4 * i + 2] - mi * mi;
    const double cov_ip = means[4 * i + 3] - mi * mp;
    const double ai = cov_ip / (var_i + params.epsilon);
    coeffs[2 * i] = ai;
    coeffs[2 * i + 1] = mp - ai * mi;
  }
  box_mean_interleaved(std::span(coeffs).first(2 * n), w, h, 2, r, std::span(mean_coeffs).first(2 * n));

  GrayImage out(w, h);
  auto q = out.values();
  for (std::size_t i = 0; i < n; ++i) q[i] = mean_coeffs[2 * i] * I[i] + mean_coeffs[2 * i + 1];
  return out;
}

Matte refine_matte(const Matte& coarse, const Frame& frame_full, const GuidedFilterParams& params) {
  const GrayImage upsampled =
      resize_bilinear(coarse, frame_full.width(), frame_full.height()).retag<GrayTag>();
  GrayImage refined = guided_filter(blue_channel(frame_full), upsampled, params);
  refined.clamp01();
  return std::move(refined).retag<MatteTag>();
}

}  // namespace skyblendr
