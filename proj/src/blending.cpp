#include "skyblendr/blending.hpp"

#include <stdexcept>

namespace skyblendr {

void HarmonizationParams::validate() const {
  if (!(alpha >= 0.0)) throw std::invalid_argument("recoloring factor alpha must be >= 0");
  if (!(beta > 0.0)) throw std::invalid_argument("relighting factor beta must be > 0");
  if (!(sky_threshold > 0.0 && sky_threshold < 1.0)) throw std::invalid_argument("sky threshold must lie in (0, 1)");
}

WeatherLayer make_haze_layer(double opacity, double level) {
  WeatherLayer layer;
  layer.kind = WeatherKind::haze;
  layer.opacity = opacity;
  layer.frames.emplace_back(1, 1, level);
  return layer;
}

Rgb mean_color(const Frame& image) {
  Rgb sum{0.0, 0.0, 0.0};
  auto v = image.values();
  for (std::size_t i = 0; i < v.size(); i += 3) {
    sum[0] += v[i];
    sum[1] += v[i + 1];
    sum[2] += v[i + 2];
  }
  const double n = static_cast<double>(image.pixel_count());
  return {sum[0] / n, sum[1] / n, sum[2] / n};
}

RegionMeans region_means(const Frame& frame, const Frame& background, const Matte& matte, double threshold) {
  if (!frame.same_size(background) || !frame.same_size(matte)) {
    throw std::invalid_argument("region_means needs frame, background and matte of equal size");
  }
  Rgb fg{0.0, 0.0, 0.0}, sky{0.0, 0.0, 0.0}, all{0.0, 0.0, 0.0}, bg_all{0.0, 0.0, 0.0};
  std::size_t fg_count = 0, sky_count = 0;
  auto I = frame.values();
  auto B = background.values();
  auto A = matte.values();
  for (std::size_t p = 0; p < A.size(); ++p) {
    const bool is_sky = A[p] >= threshold;
    for (int c = 0; c < 3; ++c) {
      const double iv = I[3 * p + c];
      const double bv = B[3 * p + c];
      all[c] += iv;
      bg_all[c] += bv;
      if (is_sky) {
        sky[c] += bv;
      } else {
        fg[c] += iv;
      }
    }
    (is_sky ? sky_count : fg_count) += 1;
  }
  const double n = static_cast<double>(A.size());
  RegionMeans means;
  for (int c = 0; c < 3; ++c) {
    means.global[c] = all[c] / n;
    means.foreground[c] = fg_count ? fg[c] / fg_count : means.global[c];
    means.sky[c] = sky_count ? sky[c] / sky_count : bg_all[c] / n;
  }
  return means;
}

Frame recolor(const Frame& frame, const RegionMeans& means, double alpha) {
  Frame out = frame;
  if (alpha == 0.0) return out;
  const Rgb shift{alpha * (means.sky[0] - means.foreground[0]), alpha * (means.sky[1] - means.foreground[1]),
                  alpha * (means.sky[2] - means.foreground[2])};
  auto v = out.values();
  for (std::size_t i = 0; i < v.size(); i += 3) {
    v[i] += shift[0];
    v[i + 1] += shift[1];
    v[i + 2] += shift[2];
  }
  return out;
}

Frame relight(const Frame& recolored, const Rgb& target_mean, double beta) {
  const Rgb current = mean_color(recolored);
  const Rgb offset{target_mean[0] - current[0], target_mean[1] - current[1], target_mean[2] - current[2]};
  Frame out = recolored;
  auto v = out.values();
  for (std::size_t i = 0; i < v.size(); i += 3) {
    for (int c = 0; c < 3; ++c) v[i + c] = std::clamp(beta * (v[i + c] + offset[c]), 0.0, 1.0);
  }
  return out;
}

Frame alpha_blend(const Frame& frame, const Frame& background, const Matte& matte) {
  if (!frame.same_size(background) || !frame.same_size(matte)) {
    throw std::invalid_argument("alpha_blend needs frame, background and matte of equal size");
  }
  Frame out(frame.width(), frame.height());
  auto I = frame.values();
  auto B = background.values();
  auto A = matte.values();
  auto Y = out.values();
  for (std::size_t p = 0; p < A.size(); ++p) {
    const double a = A[p];
    for (int c = 0; c < 3; ++c) Y[3 * p + c] = (1.0 - a) * I[3 * p + c] + a * B[3 * p + c];
  }
  return out;
}

namespace {

// The layer frame for this index, resized to the base when needed.
const Frame& layer_frame(const WeatherLayer& layer, int frame_index, int w, int h, Frame& resized) {
  const std::size_t pick = static_cast<std::size_t>(std::max(frame_index, 0)) % layer.frames.size();
  const Frame& source = layer.frames[pick];
  if (source.same_size(w, h)) return source;
  resized = resize_bilinear(source, w, h);
  return resized;
}

// 1 - (1 - b)(1 - o*l), rearranged so a zero layer leaves b bit-identical.
void screen_in_place(std::span<double> base, std::span<const double> layer, double opacity) {
  for (std::size_t i = 0; i < base.size(); ++i) base[i] += opacity * layer[i] * (1.0 - base[i]);
}

}  // namespace

Frame screen_blend(const Frame& base, const WeatherLayer& layer, int frame_index) {
  if (layer.frames.empty()) return base;
  Frame resized;
  const Frame& top = layer_frame(layer, frame_index, base.width(), base.height(), resized);
  Frame out = base;
  screen_in_place(out.values(), top.values(), layer.opacity);
  return out;
}

// Same arithmetic as region_means -> recolor -> relight -> alpha_blend ->
// screen_blend -> clamp01, evaluated in one output buffer.
Frame harmonize_and_compose(const Frame& frame, const Frame& background, const Matte& matte,
                            const HarmonizationParams& params, std::span<const WeatherLayer> layers,
                            int frame_index) {
  const RegionMeans means = region_means(frame, background, matte, params.sky_threshold);
  const bool shifted = params.alpha != 0.0;
  Rgb shift{0.0, 0.0, 0.0};
  for (int c = 0; c < 3; ++c) shift[c] = params.alpha * (means.sky[c] - means.foreground[c]);

  auto I = frame.values();
  auto B = background.values();
  auto A = matte.values();
  const std::size_t pixels = A.size();

  Rgb sum{0.0, 0.0, 0.0};
  for (std::size_t p = 0; p < pixels; ++p)
    for (int c = 0; c < 3; ++c) sum[c] += shifted ? I[3 * p + c] + shift[c] : I[3 * p + c];
  const double n = static_cast<double>(pixels);
  Rgb offset{};
  for (int c = 0; c < 3; ++c) offset[c] = means.global[c] - sum[c] / n;

  Frame out(frame.width(), frame.height());
  auto Y = out.values();
  for (std::size_t p = 0; p < pixels; ++p) {
    const double a = A[p];
    for (int c = 0; c < 3; ++c) {
      const std::size_t i = 3 * p + c;
      const double recolored = shifted ? I[i] + shift[c] : I[i];
      const double relit = std::clamp(params.beta * (recolored + offset[c]), 0.0, 1.0);
      Y[i] = (1.0 - a) * relit + a * B[i];
    }
  }
  for (const WeatherLayer& layer : layers) {
    if (layer.frames.empty()) continue;
    Frame resized;
    screen_in_place(Y, layer_frame(layer, frame_index, out.width(), out.height(), resized).values(), layer.opacity);
  }
  out.clamp01();
  return out;
}

}  // namespace skyblendr
