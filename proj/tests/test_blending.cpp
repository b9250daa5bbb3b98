#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "skyblendr/blending.hpp"

namespace skyblendr {
namespace {

Frame constant_rgb(int w, int h, Rgb c) {
  Frame f(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int k = 0; k < 3; ++k) f.at(x, y, k) = c[k];
  return f;
}

Matte random_matte(int w, int h, std::mt19937_64& rng) { return oracle::random_gray(w, h, rng).retag<MatteTag>(); }

TEST(RegionMeans, EmptyRegionsFallBackToGlobalMeans) {
  std::mt19937_64 rng(61);
  const Frame I = oracle::random_frame(12, 9, rng);
  const Frame B = oracle::random_frame(12, 9, rng);
  const RegionMeans m = region_means(I, B, Matte(12, 9, 0.0), 0.5);
  const Rgb gi = mean_color(I), gb = mean_color(B);
  for (int c = 0; c < 3; ++c) {
    EXPECT_NEAR(m.foreground[c], gi[c], 1e-12);
    EXPECT_NEAR(m.global[c], gi[c], 1e-12);
    EXPECT_NEAR(m.sky[c], gb[c], 1e-12);
  }
  const RegionMeans all_sky = region_means(I, B, Matte(12, 9, 1.0), 0.5);
  for (int c = 0; c < 3; ++c) {
    EXPECT_NEAR(all_sky.foreground[c], gi[c], 1e-12);
    EXPECT_NEAR(all_sky.sky[c], gb[c], 1e-12);
  }
}

TEST(RegionMeans, ConstantFrameAnyMatte) {
  std::mt19937_64 rng(62);
  const RegionMeans m =
      region_means(constant_rgb(10, 10, {0.2, 0.2, 0.2}), oracle::random_frame(10, 10, rng), random_matte(10, 10, rng), 0.5);
  for (int c = 0; c < 3; ++c) {
    EXPECT_NEAR(m.foreground[c], 0.2, 1e-15);
    EXPECT_NEAR(m.global[c], 0.2, 1e-15);
  }
}

TEST(RegionMeans, HalfSplitMatte) {
  Frame I(8, 4), B(8, 4);
  Matte A(8, 4);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 8; ++x) {
      const bool sky = y < 2;
      A.at(x, y) = sky ? 0.8 : 0.1;
      for (int c = 0; c < 3; ++c) {
        I.at(x, y, c) = sky ? 0.9 : 0.3 + 0.1 * c;
        B.at(x, y, c) = sky ? 0.6 - 0.1 * c : 0.05;
      }
    }
  const RegionMeans m = region_means(I, B, A, 0.5);
  for (int c = 0; c < 3; ++c) {
    EXPECT_NEAR(m.foreground[c], 0.3 + 0.1 * c, 1e-15);
    EXPECT_NEAR(m.sky[c], 0.6 - 0.1 * c, 1e-15);
    EXPECT_NEAR(m.global[c], 0.5 * (0.9 + 0.3 + 0.1 * c), 1e-15);
  }
}

TEST(RegionMeans, ThresholdIsInclusiveForSky) {
  Frame I = constant_rgb(2, 1, {0.0, 0.0, 0.0});
  Frame B(2, 1);
  B.at(0, 0, 0) = 1.0;
  Matte A(2, 1);
  A.at(0, 0) = 0.5;
  const RegionMeans m = region_means(I, B, A, 0.5);
  EXPECT_EQ(m.sky[0], 1.0);
}

TEST(RegionMeans, RejectsMismatchedSizes) {
  EXPECT_THROW(region_means(Frame(4, 4), Frame(4, 5), Matte(4, 4), 0.5), std::invalid_argument);
  EXPECT_THROW(region_means(Frame(4, 4), Frame(4, 4), Matte(3, 4), 0.5), std::invalid_argument);
}

TEST(Recolor, ZeroAlphaAndZeroShiftAreIdentities) {
  std::mt19937_64 rng(63);
  const Frame I = oracle::random_frame(9, 7, rng);
  const RegionMeans means{{0.1, 0.5, 0.9}, {0.7, 0.2, 0.3}, {0.4, 0.4, 0.4}};
  EXPECT_EQ(recolor(I, means, 0.0), I);
  const RegionMeans equal{{0.3, 0.2, 0.1}, {0.3, 0.2, 0.1}, {0.0, 0.0, 0.0}};
  EXPECT_EQ(recolor(I, equal, 0.8), I);
}

TEST(Recolor, HandEvaluatedShift) {
  // Sky minus foreground = (0.1, -0.2, 0.0).
  const RegionMeans means{{0.3, 0.5, 0.2}, {0.4, 0.3, 0.2}, {0.4, 0.4, 0.4}};
  const Frame out = recolor(constant_rgb(5, 5, {0.4, 0.4, 0.4}), means, 0.5);
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 5; ++x) {
      EXPECT_NEAR(out.at(x, y, 0), 0.45, 1e-12);
      EXPECT_NEAR(out.at(x, y, 1), 0.30, 1e-12);
      EXPECT_NEAR(out.at(x, y, 2), 0.40, 1e-12);
    }
}

TEST(Recolor, LeavesValuesUnclamped) {
  const RegionMeans means{{0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}, {0.5, 0.5, 0.5}};
  const Frame out = recolor(constant_rgb(2, 2, {0.9, 0.9, 0.9}), means, 0.5);
  EXPECT_NEAR(out.at(0, 0, 0), 1.4, 1e-12);
}

TEST(Relight, UnitBetaFixedPoint) {
  std::mt19937_64 rng(64);
  const Frame I = oracle::random_frame(10, 8, rng);
  EXPECT_LT(oracle::max_abs_diff(relight(I, mean_color(I), 1.0), I), 1e-12);
}

TEST(Relight, CancelsUniformOffset) {
  std::mt19937_64 rng(65);
  Frame I = oracle::random_frame(10, 8, rng);
  for (double& v : I.values()) v = 0.1 + 0.8 * v;
  Frame shifted = I;
  for (double& v : shifted.values()) v += 0.1;
  EXPECT_LT(oracle::max_abs_diff(relight(shifted, mean_color(I), 1.0), I), 1e-12);
}

TEST(Relight, BetaScalesAndClamps) {
  const Frame out = relight(constant_rgb(4, 4, {0.5, 0.5, 0.5}), {0.5, 0.5, 0.5}, 0.8);
  for (double v : out.values()) EXPECT_NEAR(v, 0.4, 1e-12);
  const Frame bright = relight(constant_rgb(2, 2, {0.5, 0.5, 0.5}), {0.9, 0.9, 0.9}, 1.5);
  for (double v : bright.values()) EXPECT_EQ(v, 1.0);
}

TEST(AlphaBlend, Boundaries) {
  std::mt19937_64 rng(66);
  const Frame I = oracle::random_frame(7, 6, rng);
  const Frame B = oracle::random_frame(7, 6, rng);
  EXPECT_EQ(alpha_blend(I, B, Matte(7, 6, 0.0)), I);
  EXPECT_EQ(alpha_blend(I, B, Matte(7, 6, 1.0)), B);
  for (double v : alpha_blend(Frame(3, 3, 0.0), Frame(3, 3, 1.0), Matte(3, 3, 0.25)).values()) EXPECT_EQ(v, 0.25);
}

TEST(AlphaBlend, ConvexPerChannel) {
  std::mt19937_64 rng(67);
  for (int trial = 0; trial < 10; ++trial) {
    const Frame I = oracle::random_frame(11, 9, rng);
    const Frame B = oracle::random_frame(11, 9, rng);
    const Matte A = random_matte(11, 9, rng);
    const Frame Y = alpha_blend(I, B, A);
    for (std::size_t i = 0; i < Y.values().size(); ++i) {
      const double lo = std::min(I.values()[i], B.values()[i]);
      const double hi = std::max(I.values()[i], B.values()[i]);
      ASSERT_GE(Y.values()[i], lo - 1e-15);
      ASSERT_LE(Y.values()[i], hi + 1e-15);
    }
  }
}

TEST(AlphaBlend, DimensionMismatchThrows) {
  EXPECT_THROW(alpha_blend(Frame(4, 4), Frame(4, 4), Matte(4, 3)), std::invalid_argument);
  EXPECT_THROW(alpha_blend(Frame(4, 4), Frame(5, 4), Matte(4, 4)), std::invalid_argument);
}

WeatherLayer layer_of(const Frame& f, double opacity) {
  WeatherLayer l;
  l.kind = WeatherKind::rain;
  l.frames = {f};
  l.opacity = opacity;
  return l;
}

TEST(ScreenBlend, IdentityAbsorbingAndHalf) {
  std::mt19937_64 rng(68);
  const Frame base = oracle::random_frame(6, 5, rng);
  EXPECT_EQ(screen_blend(base, layer_of(Frame(6, 5, 0.0), 1.0), 0), base);
  for (double v : screen_blend(base, layer_of(Frame(6, 5, 1.0), 1.0), 0).values()) EXPECT_NEAR(v, 1.0, 1e-15);
  for (double v : screen_blend(Frame(3, 3, 0.5), layer_of(Frame(3, 3, 0.5), 1.0), 0).values()) EXPECT_EQ(v, 0.75);
}

TEST(ScreenBlend, CommutativeAndMonotone) {
  std::mt19937_64 rng(69);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = u(rng), b = u(rng), op = u(rng), d = 0.1 * u(rng);
    auto screen = [&](double base, double layer, double opacity) {
      return screen_blend(Frame(1, 1, base), layer_of(Frame(1, 1, layer), opacity), 0).at(0, 0, 0);
    };
    // Swapping base with the opacity-scaled layer gives the same result.
    EXPECT_NEAR(screen(a, b, op), screen(op * b, a, 1.0), 1e-15);
    EXPECT_GE(screen(std::min(a + d, 1.0), b, op), screen(a, b, op));
    EXPECT_GE(screen(a, std::min(b + d, 1.0), op), screen(a, b, op));
  }
}

TEST(ScreenBlend, CyclesSequenceAndResizes) {
  WeatherLayer rain;
  rain.kind = WeatherKind::rain;
  rain.opacity = 1.0;
  rain.frames = {Frame(2, 2, 0.0), Frame(2, 2, 1.0)};
  const Frame base(8, 6, 0.2);
  EXPECT_EQ(screen_blend(base, rain, 0), base);
  for (double v : screen_blend(base, rain, 3).values()) EXPECT_NEAR(v, 1.0, 1e-15);
  EXPECT_EQ(screen_blend(base, rain, 4), base);

  const Frame hazed = screen_blend(base, make_haze_layer(0.5, 0.8), 0);
  for (double v : hazed.values()) EXPECT_NEAR(v, 1.0 - 0.8 * 0.6, 1e-15);
}

TEST(HarmonizeAndCompose, NeutralParamsReduceToPlainBlend) {
  std::mt19937_64 rng(70);
  const Frame I = oracle::random_frame(16, 12, rng);
  const Frame B = oracle::random_frame(16, 12, rng);
  const Matte A = random_matte(16, 12, rng);
  const HarmonizationParams neutral{0.0, 1.0, 0.5};
  EXPECT_LT(oracle::max_abs_diff(harmonize_and_compose(I, B, A, neutral), alpha_blend(I, B, A)), 1e-12);
  EXPECT_LT(oracle::max_abs_diff(harmonize_and_compose(I, B, Matte(16, 12, 0.0), neutral), I), 1e-12);
}

TEST(HarmonizeAndCompose, EqualsManualCompositionBitExactly) {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 5; ++trial) {
    const Frame I = oracle::random_frame(20, 15, rng);
    const Frame B = oracle::random_frame(20, 15, rng);
    const Matte A = random_matte(20, 15, rng);
    const HarmonizationParams params;
    const std::vector<WeatherLayer> layers{make_haze_layer(0.3), layer_of(oracle::random_frame(10, 8, rng), 0.6)};

    const RegionMeans means = region_means(I, B, A, params.sky_threshold);
    Frame manual = alpha_blend(relight(recolor(I, means, params.alpha), means.global, params.beta), B, A);
    for (const WeatherLayer& l : layers) manual = screen_blend(manual, l, trial);
    manual.clamp01();

    EXPECT_EQ(harmonize_and_compose(I, B, A, params, layers, trial), manual);
  }
}

TEST(HarmonizationParams, Validation) {
  EXPECT_NO_THROW(HarmonizationParams{}.validate());
  EXPECT_THROW((HarmonizationParams{-0.1, 1.0, 0.5}.validate()), std::invalid_argument);
  EXPECT_THROW((HarmonizationParams{0.5, 0.0, 0.5}.validate()), std::invalid_argument);
  EXPECT_THROW((HarmonizationParams{0.5, 1.0, 1.0}.validate()), std::invalid_argument);
}

}  // namespace
}  // namespace skyblendr
