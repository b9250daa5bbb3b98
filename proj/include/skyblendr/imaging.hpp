#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "skyblendr/geometry.hpp"

namespace skyblendr {

struct FrameTag {};
struct GrayTag {};
struct MatteTag {};

/// Row-major, channel-interleaved image of doubles.
///
/// Pixel (x, y) has its center at integer coordinates (x, y). Values are
/// nominally in [0, 1]; filter internals may hold unclamped intermediates and
/// clamp at their public boundary.
template <int Channels, typename Tag>
class Image {
 public:
  static_assert(Channels >= 1);
  static constexpr int kChannels = Channels;

  Image() = default;

  Image(int width, int height, double fill = 0.0) : width_(width), height_(height) {
    if (width < 1 || height < 1) {
      throw std::invalid_argument("image dimensions must be positive, got " + std::to_string(width) + "x" +
                                  std::to_string(height));
    }
    data_.assign(static_cast<std::size_t>(width) * height * Channels, fill);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  static constexpr int channels() { return Channels; }
  bool empty() const { return data_.empty(); }
  std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }

  double& at(int x, int y, int c = 0) { return data_[index(x, y, c)]; }
  double at(int x, int y, int c = 0) const { return data_[index(x, y, c)]; }

  std::span<double> row(int y) {
    return {data_.data() + static_cast<std::size_t>(y) * width_ * Channels, static_cast<std::size_t>(width_) * Channels};
  }
  std::span<const double> row(int y) const {
    return {data_.data() + static_cast<std::size_t>(y) * width_ * Channels, static_cast<std::size_t>(width_) * Channels};
  }

  std::span<double> values() & { return data_; }
  std::span<const double> values() const& { return data_; }
  /// On a temporary the buffer is moved out, so `for (double v : f().values())` is safe.
  std::vector<double> values() && { return std::move(data_); }

  bool same_size(int w, int h) const { return width_ == w && height_ == h; }
  template <int C, typename T>
  bool same_size(const Image<C, T>& other) const {
    return width_ == other.width() && height_ == other.height();
  }

  void clamp01() {
    for (double& v : data_) v = std::clamp(v, 0.0, 1.0);
  }

  friend bool operator==(const Image&, const Image&) = default;

  /// Reinterprets the pixel buffer under another tag with the same channel count.
  template <typename OtherTag>
  Image<Channels, OtherTag> retag() && {
    Image<Channels, OtherTag> out;
    out.adopt(width_, height_, std::move(data_));
    width_ = height_ = 0;
    return out;
  }
  template <typename OtherTag>
  Image<Channels, OtherTag> retag() const& {
    Image<Channels, OtherTag> out;
    out.adopt(width_, height_, data_);
    return out;
  }

  // Used by retag(); prefer the sized constructor elsewhere.
  void adopt(int width, int height, std::vector<double> data) {
    width_ = width;
    height_ = height;
    data_ = std::move(data);
  }

 private:
  std::size_t index(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * width_ + x) * Channels + c;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

using Frame = Image<3, FrameTag>;
using GrayImage = Image<1, GrayTag>;
using Matte = Image<1, MatteTag>;

struct ImagePyramid {
  /// levels[0] is full resolution; each further level halves both dimensions (floor).
  std::vector<GrayImage> levels;

  std::size_t size() const { return levels.size(); }
};

/// Align-corners bilinear resize: output index i maps to source position
/// i * (in - 1) / (out - 1). A single output sample along an axis maps to the
/// source center (in - 1) / 2. Same-size resize returns an exact copy.
template <int C, typename Tag>
Image<C, Tag> resize_bilinear(const Image<C, Tag>& src, int out_w, int out_h);

/// Rec.601 luma: 0.299 R + 0.587 G + 0.114 B.
GrayImage to_gray(const Frame& src);

GrayImage blue_channel(const Frame& src);

/// Mean over the (2r+1)^2 window clipped to the image (shrinking windows at
/// borders). Runs in O(1) per pixel.
GrayImage box_filter(const GrayImage& src, int radius);

/// box_filter applied independently to each of `channels` (1..4) interleaved
/// planes of a width x height buffer.
void box_mean_interleaved(std::span<const double> src, int width, int height, int channels, int radius,
                          std::span<double> out);

/// Gaussian pyramid with the [1 4 6 4 1]/16 kernel (border-renormalized) and
/// 2x decimation. Stops before a level would drop below 16x16.
ImagePyramid build_pyramid(const GrayImage& src, int max_levels);

/// Inverse-mapping warp: output pixel p samples src at M^-1 p bilinearly.
/// With `wrap` the source is tiled periodically in both axes; otherwise
/// samples clamp to the nearest edge pixel.
Frame warp_similarity(const Frame& src, const SimilarityTransform& m, int out_w, int out_h, bool wrap);

/// Same, writing into `out` (reallocated only when its size differs).
void warp_similarity_into(const Frame& src, const SimilarityTransform& m, int out_w, int out_h, bool wrap, Frame& out);

/// Bilinear sample with edge clamping.
inline double sample_clamped(const GrayImage& img, double x, double y) {
  const double max_x = img.width() - 1;
  const double max_y = img.height() - 1;
  x = std::clamp(x, 0.0, max_x);
  y = std::clamp(y, 0.0, max_y);
  const int x0 = static_cast<int>(x);
  const int y0 = static_cast<int>(y);
  const int x1 = std::min(x0 + 1, img.width() - 1);
  const int y1 = std::min(y0 + 1, img.height() - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  const double top = img.at(x0, y0) + fx * (img.at(x1, y0) - img.at(x0, y0));
  const double bottom = img.at(x0, y1) + fx * (img.at(x1, y1) - img.at(x0, y1));
  return top + fy * (bottom - top);
}

/// 8-bit conversions: v / 255 in, round(v * 255) clamped out.
inline double from_u8(unsigned char v) { return v / 255.0; }
inline unsigned char to_u8(double v) {
  return static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

}  // namespace skyblendr
