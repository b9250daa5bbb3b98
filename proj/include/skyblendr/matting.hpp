#pragma once

#include <filesystem>
#include <string>
#include <variant>

#include "skyblendr/imaging.hpp"

namespace skyblendr {

struct GuidedFilterParams {
  int radius = 20;
  double epsilon = 0.01;

  void validate() const;
};

/// Logistic sky score weights for the heuristic coarse matte:
///
///   sigma(blue * (B - max(R, G)) + smooth * (1 - |Sobel(luma)|)
///         + height * (1 - y / H) + brightness * luma + bias)
struct CoarseMatteWeights {
  double blue = 8.0;
  double smooth = 4.0;
  double height = 4.0;
  double brightness = 6.0;
  double bias = -9.0;
};

struct HeuristicMatteSource {
  CoarseMatteWeights weights;
};

/// Numbered single-channel images, e.g. directory "mattes", pattern "matte_%06d.png".
struct MatteFileSequence {
  std::filesystem::path directory;
  std::string pattern = "matte_%06d.png";
};

using MatteSource = std::variant<HeuristicMatteSource, MatteFileSequence>;

/// Size of the low-resolution matting input: longest side `long_side`,
/// aspect preserved. Images already within the limit keep their size.
struct Size2 {
  int width;
  int height;
};
Size2 matting_input_size(int width, int height, int long_side);

/// Heuristic stand-in for a learned coarse sky matte. Deterministic.
Matte estimate_coarse_matte(const Frame& frame_low, const CoarseMatteWeights& weights = {});

/// Loads matte `frame_index` of a file sequence, scaled to [0, 1] and resized
/// to expected_w x expected_h if needed. Throws std::runtime_error on missing
/// or multi-channel files.
Matte load_matte(const MatteFileSequence& source, int frame_index, int expected_w, int expected_h);

/// Guided filter (box-window means of radius r). Output is not clamped.
GrayImage guided_filter(const GrayImage& guide, const GrayImage& src, const GuidedFilterParams& params);

/// Upsamples `coarse` to the frame size, filters it with the frame's blue
/// channel as guide and clamps to [0, 1].
Matte refine_matte(const Matte& coarse, const Frame& frame_full, const GuidedFilterParams& params);

}  // namespace skyblendr
