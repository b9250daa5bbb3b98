#include "skyblendr/skybox.hpp"

#include <stdexcept>
#include <string>

namespace skyblendr {

void SkyBoxTemplate::validate() const {
  if (image.empty()) throw std::invalid_argument("sky template image is empty");
  if (!(crop_factor > 0.0 && crop_factor <= 1.0)) {
    throw std::invalid_argument("crop factor must lie in (0, 1], got " + std::to_string(crop_factor));
  }
}

bool SkyBoxTemplate::covers(const ViewportSpec& view) const {
  return image.width() >= 2 * view.out_w && image.height() >= 2 * view.out_h;
}

SimilarityTransform center_crop_transform(const SkyBoxTemplate& sky, const ViewportSpec& view) {
  sky.validate();
  if (view.out_w < 1 || view.out_h < 1) throw std::invalid_argument("viewport dimensions must be positive");
  const double scale = view.out_w / (sky.crop_factor * sky.image.width());
  const double tx = 0.5 * view.out_w - scale * 0.5 * sky.image.width();
  const double ty = 0.5 * view.out_h - scale * 0.5 * sky.image.height();
  return SimilarityTransform::from_linear(scale, 0.0, tx, ty);
}

Frame render_background(const SkyBoxTemplate& sky, const SimilarityTransform& accumulated, const ViewportSpec& view) {
  sky.validate();
  return warp_similarity(sky.image, accumulated, view.out_w, view.out_h, /*wrap=*/true);
}

void render_background_into(const SkyBoxTemplate& sky, const SimilarityTransform& accumulated, const ViewportSpec& view,
                            Frame& out) {
  sky.validate();
  warp_similarity_into(sky.image, accumulated, view.out_w, view.out_h, /*wrap=*/true, out);
}

Frame make_mirror_tileable(const Frame& image) {
  const int w = image.width();
  const int h = image.height();
  Frame out(2 * w, 2 * h);
  for (int y = 0; y < 2 * h; ++y) {
    const int sy = y < h ? y : 2 * h - 1 - y;
    for (int x = 0; x < 2 * w; ++x) {
      const int sx = x < w ? x : 2 * w - 1 - x;
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = image.at(sx, sy, c);
    }
  }
  return out;
}

}  // namespace skyblendr
