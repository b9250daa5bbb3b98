#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "skyblendr/motion.hpp"
#include "skyblendr/skybox.hpp"

namespace skyblendr {
namespace {

SkyBoxTemplate random_template(int w, int h, double crop, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return {oracle::random_frame(w, h, rng), crop};
}

TEST(CenterCrop, AlignedDimensionsGiveUnitScale) {
  const SkyBoxTemplate sky{Frame(1280, 720), 0.5};
  const auto m = center_crop_transform(sky, {640, 360});
  EXPECT_DOUBLE_EQ(m.scale(), 1.0);
  EXPECT_DOUBLE_EQ(m.rotation(), 0.0);
  const Point2 c = m.apply({640.0, 360.0});
  EXPECT_DOUBLE_EQ(c.x, 320.0);
  EXPECT_DOUBLE_EQ(c.y, 180.0);
}

TEST(CenterCrop, FullCropOfSameSizeIsIdentity) {
  const SkyBoxTemplate sky{Frame(320, 200), 1.0};
  EXPECT_EQ(center_crop_transform(sky, {320, 200}), SimilarityTransform{});
}

TEST(CenterCrop, WidthGovernsScaleAndCenterIsPreserved) {
  const SkyBoxTemplate sky{Frame(2000, 1000), 0.5};
  const auto m = center_crop_transform(sky, {640, 360});
  EXPECT_NEAR(m.scale(), 0.64, 1e-15);
  const Point2 c = m.apply({1000.0, 500.0});
  EXPECT_NEAR(c.x, 320.0, 1e-9);
  EXPECT_NEAR(c.y, 180.0, 1e-9);
}

TEST(CenterCrop, RejectsBadCropFactor) {
  EXPECT_THROW(center_crop_transform({Frame(10, 10), 0.0}, {5, 5}), std::invalid_argument);
  EXPECT_THROW(center_crop_transform({Frame(10, 10), 1.5}, {5, 5}), std::invalid_argument);
  EXPECT_THROW(center_crop_transform({Frame(10, 10), 0.5}, {0, 5}), std::invalid_argument);
}

TEST(RenderBackground, NoMotionEqualsExactCenterCrop) {
  const SkyBoxTemplate sky = random_template(128, 80, 0.5, 51);
  const ViewportSpec view{64, 40};
  const Frame out = render_background(sky, accumulate_motion({}, center_crop_transform(sky, view)), view);
  // Crop region is [32, 96) x [20, 60) at unit scale; resize to the same size is the identity.
  Frame crop(64, 40);
  for (int y = 0; y < 40; ++y)
    for (int x = 0; x < 64; ++x)
      for (int c = 0; c < 3; ++c) crop.at(x, y, c) = sky.image.at(x + 32, y + 20, c);
  EXPECT_LT(oracle::max_abs_diff(out, resize_bilinear(crop, 64, 40)), 1e-6);
}

TEST(RenderBackground, IntoReusesBufferAndMatches) {
  const SkyBoxTemplate sky = random_template(128, 80, 0.5, 52);
  const ViewportSpec view{64, 40};
  Frame buffer;
  for (int k = 0; k < 3; ++k) {
    const SimilarityTransform m = SimilarityTransform::from_linear(0.9, 0.1 * k, -30.0 + 7.5 * k, -12.0);
    render_background_into(sky, m, view, buffer);
    const double* data = buffer.values().data();
    EXPECT_EQ(buffer, render_background(sky, m, view));
    render_background_into(sky, m, view, buffer);
    EXPECT_EQ(buffer.values().data(), data);
  }
  Frame small(8, 8);
  render_background_into(sky, SimilarityTransform{}, view, small);
  EXPECT_TRUE(small.same_size(64, 40));
  Frame self = sky.image;
  EXPECT_THROW(warp_similarity_into(self, SimilarityTransform{}, 8, 8, true, self), std::invalid_argument);
}

TEST(RenderBackground, ScaledCropMatchesPerPixelOracle) {
  const SkyBoxTemplate sky = random_template(100, 60, 0.5, 52);
  const ViewportSpec view{40, 22};
  const auto m = center_crop_transform(sky, view);
  const Frame out = render_background(sky, m, view);
  const double s = m.scale();
  for (int y = 0; y < view.out_h; ++y)
    for (int x = 0; x < view.out_w; ++x)
      for (int c = 0; c < 3; ++c) {
        const double u = (x - 20.0) / s + 50.0;
        const double v = (y - 11.0) / s + 30.0;
        EXPECT_NEAR(out.at(x, y, c), oracle::bilinear_at(sky.image, u, v, c, true), 1e-9);
      }
}

TEST(RenderBackground, PeriodicInTemplateSize) {
  const SkyBoxTemplate sky = random_template(90, 50, 0.6, 53);
  const ViewportSpec view{48, 27};
  const auto base = center_crop_transform(sky, view) * SimilarityTransform::from_params(1.0, 0.05, 7.3, -2.1);
  const Frame ref = render_background(sky, base, view);
  for (auto [kx, ky] : {std::pair{1, 0}, {0, 1}, {-2, 3}}) {
    const auto shifted = base * SimilarityTransform::translation(90.0 * kx, 50.0 * ky);
    EXPECT_LT(oracle::max_abs_diff(render_background(sky, shifted, view), ref), 1e-9);
  }
  // At unit scale a frame-space shift by one template width is also a period.
  const SkyBoxTemplate unit = random_template(80, 40, 0.5, 54);
  const auto crop = center_crop_transform(unit, {40, 20});
  EXPECT_EQ(render_background(unit, SimilarityTransform::translation(80, 0) * crop, {40, 20}),
            render_background(unit, crop, {40, 20}));
}

TEST(RenderBackground, ScrollingSequenceMatchesPreTiledOracle) {
  const SkyBoxTemplate sky = random_template(60, 40, 0.5, 55);
  const ViewportSpec view{30, 20};
  // 3x3 tiled copy of the template, sampled without wrapping.
  Frame tiled(180, 120);
  for (int y = 0; y < 120; ++y)
    for (int x = 0; x < 180; ++x)
      for (int c = 0; c < 3; ++c) tiled.at(x, y, c) = sky.image.at(x % 60, y % 40, c);

  std::vector<SimilarityTransform> history;
  const auto crop = center_crop_transform(sky, view);
  for (int t = 0; t < 12; ++t) {
    if (t > 0) history.push_back(SimilarityTransform::translation(1.75, 0.0));
    const Frame out = render_background(sky, accumulate_motion(history, crop), view);
    const double shift = 1.75 * t;
    for (int y = 0; y < view.out_h; ++y)
      for (int x = 0; x < view.out_w; ++x) {
        // Frame pixel x shows template x + 15 - shift, moved into the middle tile.
        const double u = x + 15.0 - shift + 60.0;
        const double v = y + 10.0 + 40.0;
        for (int c = 0; c < 3; ++c) ASSERT_NEAR(out.at(x, y, c), oracle::bilinear_at(tiled, u, v, c, false), 1e-9);
      }
  }
}

TEST(MirrorTileable, OppositeEdgesMatch) {
  std::mt19937_64 rng(56);
  const Frame src = oracle::random_frame(7, 5, rng);
  const Frame tiled = make_mirror_tileable(src);
  ASSERT_TRUE(tiled.same_size(14, 10));
  for (int y = 0; y < 10; ++y)
    for (int c = 0; c < 3; ++c) EXPECT_EQ(tiled.at(0, y, c), tiled.at(13, y, c));
  for (int x = 0; x < 14; ++x)
    for (int c = 0; c < 3; ++c) EXPECT_EQ(tiled.at(x, 0, c), tiled.at(x, 9, c));
}

TEST(SkyBoxTemplate, CoverageHint) {
  const SkyBoxTemplate sky{Frame(1280, 720), 0.5};
  EXPECT_TRUE(sky.covers({640, 360}));
  EXPECT_FALSE(sky.covers({641, 360}));
}

}  // namespace
}  // namespace skyblendr
