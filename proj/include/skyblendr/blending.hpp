#pragma once

#include <array>
#include <span>
#include <vector>

#include "skyblendr/imaging.hpp"

namespace skyblendr {

using Rgb = std::array<double, 3>;

struct HarmonizationParams {
  double alpha = 0.5;          // recoloring strength
  double beta = 1.0;           // relighting gain
  double sky_threshold = 0.5;  // matte cutoff separating sky from foreground

  void validate() const;
};

struct RegionMeans {
  Rgb foreground;  // frame, pixels with matte < threshold
  Rgb sky;         // background, pixels with matte >= threshold
  Rgb global;      // frame, all pixels
};

enum class WeatherKind { rain, haze };

struct WeatherLayer {
  WeatherKind kind = WeatherKind::haze;
  std::vector<Frame> frames;  // cycled by frame index
  double opacity = 1.0;
};

/// Constant light-gray haze (a single pixel stretched over the frame).
WeatherLayer make_haze_layer(double opacity, double level = 0.8);

Rgb mean_color(const Frame& image);

/// Per-channel region means. An empty region falls back to the global mean of
/// the image it is taken from.
RegionMeans region_means(const Frame& frame, const Frame& background, const Matte& matte, double threshold);

/// frame + alpha * (means.sky - means.foreground), unclamped.
Frame recolor(const Frame& frame, const RegionMeans& means, double alpha);

/// beta * (recolored + target_mean - mean(recolored)), clamped to [0, 1].
Frame relight(const Frame& recolored, const Rgb& target_mean, double beta);

/// (1 - A) * frame + A * background.
Frame alpha_blend(const Frame& frame, const Frame& background, const Matte& matte);

/// 1 - (1 - base) * (1 - opacity * layer). The layer frame is chosen by
/// frame_index modulo the sequence length and resized to the base if needed.
Frame screen_blend(const Frame& base, const WeatherLayer& layer, int frame_index);

/// region_means -> recolor -> relight -> alpha_blend -> screen layers -> clamp.
Frame harmonize_and_compose(const Frame& frame, const Frame& background, const Matte& matte,
                            const HarmonizationParams& params, std::span<const WeatherLayer> layers = {},
                            int frame_index = 0);

}  // namespace skyblendr
