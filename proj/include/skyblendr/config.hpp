#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "skyblendr/blending.hpp"
#include "skyblendr/matting.hpp"
#include "skyblendr/motion.hpp"

namespace skyblendr {

struct WeatherLayerSpec {
  WeatherKind kind = WeatherKind::haze;
  std::filesystem::path source;  // rain: image, directory or %d pattern; haze: unused
  double opacity = 0.0;
  double level = 0.8;  // haze gray level
};

struct PipelineConfig {
  std::filesystem::path input;  // directory of numbered frames or a %d pattern
  int input_start = 0;          // first index for pattern input
  std::filesystem::path output;
  std::string output_pattern = "frame_%06d.png";
  std::filesystem::path template_path;
  double crop_factor = 0.5;
  bool mirror_tile = false;

  MatteSource matte_source = HeuristicMatteSource{};
  int matting_long_side = 384;
  GuidedFilterParams guided;
  MotionParams motion;
  HarmonizationParams harmonization;
  std::vector<WeatherLayerSpec> weather;

  int threads = 1;

  /// Numeric range checks for every component. Throws std::invalid_argument.
  void validate() const;
};

/// Parses flat "key = value" text; '#' starts a comment. Unknown keys and
/// malformed values throw std::invalid_argument naming the line.
PipelineConfig parse_config(std::string_view text, PipelineConfig base = {});

PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base = {});

/// Applies one setting by key (the same keys the config file accepts).
void apply_setting(PipelineConfig& config, std::string_view key, std::string_view value);

}  // namespace skyblendr
