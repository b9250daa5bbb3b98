#pragma once

#include "skyblendr/geometry.hpp"
#include "skyblendr/imaging.hpp"

namespace skyblendr {

struct ViewportSpec {
  int out_w = 0;
  int out_h = 0;
};

/// Sky template tiled in both axes. crop_factor is the fraction of the
/// template width (and height) seen by the virtual camera.
struct SkyBoxTemplate {
  Frame image;
  double crop_factor = 0.5;

  /// Throws std::invalid_argument for an empty image or crop_factor outside (0, 1].
  void validate() const;

  /// True when the template is at least twice the viewport in both axes.
  bool covers(const ViewportSpec& view) const;
};

/// Maps template coordinates to frame coordinates so that the centered
/// (crop_factor * W) x (crop_factor * H) region fills the viewport. Scale is
/// uniform and set by width: s = out_w / (crop_factor * W); the template
/// center (W/2, H/2) lands on the viewport center (out_w/2, out_h/2).
SimilarityTransform center_crop_transform(const SkyBoxTemplate& sky, const ViewportSpec& view);

/// Warps the tiled template into the viewport with the accumulated transform.
Frame render_background(const SkyBoxTemplate& sky, const SimilarityTransform& accumulated, const ViewportSpec& view);
void render_background_into(const SkyBoxTemplate& sky, const SimilarityTransform& accumulated, const ViewportSpec& view,
                            Frame& out);

/// Mirrors the image into a 2W x 2H block so opposite edges match when tiled.
Frame make_mirror_tileable(const Frame& image);

}  // namespace skyblendr
