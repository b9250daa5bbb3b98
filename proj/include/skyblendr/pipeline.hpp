#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "skyblendr/blending.hpp"
#include "skyblendr/config.hpp"
#include "skyblendr/matting.hpp"
#include "skyblendr/motion.hpp"
#include "skyblendr/skybox.hpp"

namespace skyblendr {

/// Wall-clock seconds per stage of one frame.
struct PhaseTimings {
  double matting = 0.0;
  double motion = 0.0;
  double render = 0.0;
  double blend = 0.0;
  double total = 0.0;
};

struct FrameReport {
  int index = 0;
  int feature_count = 0;
  int match_count = 0;     // tracked by LK
  int filtered_count = 0;  // left after the KDE filter
  int inlier_count = 0;
  bool fallback = false;   // motion estimate failed; previous step reused
  SimilarityTransform step;         // M^(t), identity at t = 0
  SimilarityTransform accumulated;  // transform used to render the sky
  PhaseTimings timings;
};

/// Everything carried from one frame to the next.
struct PipelineState {
  int frame_count = 0;
  int width = 0;
  int height = 0;
  ImagePyramid prev_pyramid;
  Matte prev_matte;
  std::vector<SimilarityTransform> history;  // history[i] maps frame i -> i + 1
  SimilarityTransform motion_product;        // history[t-1] * ... * history[0]
  SimilarityTransform last_step;
  SimilarityTransform crop;
  bool has_crop = false;

  /// crop * motion_product, i.e. accumulate_motion(history, crop).
  SimilarityTransform accumulated() const { return crop * motion_product; }
};

struct FrameResult {
  Frame output;
  Matte matte;
  FrameReport report;
};

/// Per-frame sky replacement: matting -> motion -> skybox render -> harmonized blend.
class SkyReplacer {
 public:
  SkyReplacer(const PipelineConfig& config, SkyBoxTemplate sky, std::vector<WeatherLayer> layers = {});

  /// Coarse matte at the matting resolution from the configured source, refined
  /// to full resolution. Does not touch the state; safe to call from another
  /// thread while process_frame runs.
  Matte compute_matte(const Frame& frame, int source_index) const;

  /// Runs all stages on `frame`; `source_index` selects file-sequence mattes.
  FrameResult process_frame(const Frame& frame, int source_index);

  /// Same, with a full-resolution matte computed elsewhere.
  FrameResult process_frame(const Frame& frame, Matte matte, double matting_seconds = 0.0);

  const PipelineState& state() const { return state_; }
  const SkyBoxTemplate& sky() const { return sky_; }

 private:
  PipelineConfig config_;
  SkyBoxTemplate sky_;
  std::vector<WeatherLayer> layers_;
  Frame background_;  // reused across frames
  PipelineState state_;
};

struct RunSummary {
  int frames = 0;
  double total_seconds = 0.0;
  double fps = 0.0;
  PhaseTimings phase_seconds;  // summed over frames
  int fallback_count = 0;
  std::vector<std::filesystem::path> outputs;
  std::vector<FrameReport> reports;
  std::vector<std::string> warnings;
};

struct InputFrame {
  std::filesystem::path path;
  int index = 0;  // numeric suffix, used to look up file-sequence mattes
};

/// Numbered input frames in index order, from a directory (trailing digits of
/// the file stem) or a %d pattern starting at input_start.
std::vector<InputFrame> list_input_frames(const PipelineConfig& config);

/// Loads the template (mirror-tiled when configured).
SkyBoxTemplate load_sky_template(const PipelineConfig& config);

std::vector<WeatherLayer> load_weather_layers(const PipelineConfig& config);

/// Validates the configuration and paths, then processes every frame in order,
/// writing output/<output_pattern> with indices 0..N-1. Fails before writing
/// anything when inputs are missing or the output directory is unusable.
RunSummary run(const PipelineConfig& config);

/// JSON report: summary fps per phase plus one record per frame.
std::string report_json(const RunSummary& summary);
void write_report(const std::filesystem::path& path, const RunSummary& summary);

}  // namespace skyblendr
