#include "skyblendr/imaging.hpp"

#include <array>

namespace skyblendr {

namespace {

struct AxisTap {
  int i0;
  int i1;
  double t;
};

// Align-corners source positions for one axis.
std::vector<AxisTap> axis_taps(int in, int out) {
  std::vector<AxisTap> taps(out);
  for (int i = 0; i < out; ++i) {
    double pos = out > 1 ? static_cast<double>(i) * (in - 1) / (out - 1) : 0.5 * (in - 1);
    int i0 = std::min(static_cast<int>(pos), in - 1);
    int i1 = std::min(i0 + 1, in - 1);
    taps[i] = {i0, i1, pos - i0};
  }
  return taps;
}

inline double wrap_coord(double v, double period) {
  if (v >= 0.0 && v < period) return v;
  double r = v - std::floor(v / period) * period;
  // floor() can leave r == period for tiny negative v.
  return r >= period ? 0.0 : r;
}

}  // namespace

template <int C, typename Tag>
Image<C, Tag> resize_bilinear(const Image<C, Tag>& src, int out_w, int out_h) {
  if (out_w < 1 || out_h < 1) {
    throw std::invalid_argument("resize target must be at least 1x1, got " + std::to_string(out_w) + "x" +
                                std::to_string(out_h));
  }
  if (src.empty()) throw std::invalid_argument("cannot resize an empty image");
  if (src.same_size(out_w, out_h)) return src;

  const auto xs = axis_taps(src.width(), out_w);
  const auto ys = axis_taps(src.height(), out_h);
  Image<C, Tag> out(out_w, out_h);
  for (int y = 0; y < out_h; ++y) {
    const AxisTap& ty = ys[y];
    auto top = src.row(ty.i0);
    auto bottom = src.row(ty.i1);
    auto dst = out.row(y);
    for (int x = 0; x < out_w; ++x) {
      const AxisTap& tx = xs[x];
      for (int c = 0; c < C; ++c) {
        const double p00 = top[tx.i0 * C + c];
        const double p10 = top[tx.i1 * C + c];
        const double p01 = bottom[tx.i0 * C + c];
        const double p11 = bottom[tx.i1 * C + c];
        const double upper = p00 + tx.t * (p10 - p00);
        const double lower = p01 + tx.t * (p11 - p01);
        dst[x * C + c] = upper + ty.t * (lower - upper);
      }
    }
  }
  return out;
}

template Frame resize_bilinear(const Frame&, int, int);
template GrayImage resize_bilinear(const GrayImage&, int, int);
template Matte resize_bilinear(const Matte&, int, int);

GrayImage to_gray(const Frame& src) {
  GrayImage out(src.width(), src.height());
  auto in = src.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = 0.299 * in[3 * i] + 0.587 * in[3 * i + 1] + 0.114 * in[3 * i + 2];
  }
  return out;
}

GrayImage blue_channel(const Frame& src) {
  GrayImage out(src.width(), src.height());
  auto in = src.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = in[3 * i + 2];
  return out;
}

namespace {

template <int K>
void box_mean_impl(const double* src, int w, int h, int r, double* out) {
  const std::size_t stride = static_cast<std::size_t>(w) * K;
  std::vector<double> inv_x(w);
  for (int x = 0; x < w; ++x) inv_x[x] = 1.0 / (std::min(x + r, w - 1) - std::max(x - r, 0) + 1);

  // Column sums over the vertical window, then a running horizontal window.
  std::vector<double> col(stride, 0.0);
  for (int y = 0; y <= std::min(r, h - 1); ++y) {
    const double* in = src + y * stride;
    for (std::size_t i = 0; i < stride; ++i) col[i] += in[i];
  }
  for (int y = 0; y < h; ++y) {
    const double inv_y = 1.0 / (std::min(y + r, h - 1) - std::max(y - r, 0) + 1);
    double* dst = out + y * stride;
    std::array<double, K> sum{};
    for (int x = 0; x <= std::min(r, w - 1); ++x)
      for (int c = 0; c < K; ++c) sum[c] += col[x * K + c];
    for (int x = 0; x < w; ++x) {
      const double scale = inv_x[x] * inv_y;
      for (int c = 0; c < K; ++c) dst[x * K + c] = sum[c] * scale;
      const int add = x + r + 1;
      const int drop = x - r;
      if (add < w)
        for (int c = 0; c < K; ++c) sum[c] += col[add * K + c];
      if (drop >= 0)
        for (int c = 0; c < K; ++c) sum[c] -= col[drop * K + c];
    }
    const int add = y + r + 1;
    const int drop = y - r;
    if (add < h) {
      const double* in = src + add * stride;
      for (std::size_t i = 0; i < stride; ++i) col[i] += in[i];
    }
    if (drop >= 0) {
      const double* in = src + drop * stride;
      for (std::size_t i = 0; i < stride; ++i) col[i] -= in[i];
    }
  }
}

}  // namespace

void box_mean_interleaved(std::span<const double> src, int width, int height, int channels, int radius,
                          std::span<double> out) {
  if (radius < 0) throw std::invalid_argument("box filter radius must be non-negative");
  if (width < 1 || height < 1) throw std::invalid_argument("box filter needs a non-empty image");
  const std::size_t n = static_cast<std::size_t>(width) * height * channels;
  if (src.size() != n || out.size() != n) throw std::invalid_argument("box filter buffer size mismatch");
  if (radius == 0) {
    std::copy(src.begin(), src.end(), out.begin());
    return;
  }
  switch (channels) {
    case 1: return box_mean_impl<1>(src.data(), width, height, radius, out.data());
    case 2: return box_mean_impl<2>(src.data(), width, height, radius, out.data());
    case 3: return box_mean_impl<3>(src.data(), width, height, radius, out.data());
    case 4: return box_mean_impl<4>(src.data(), width, height, radius, out.data());
    default: throw std::invalid_argument("box filter supports 1 to 4 interleaved channels");
  }
}

GrayImage box_filter(const GrayImage& src, int radius) {
  if (radius < 0) throw std::invalid_argument("box filter radius must be non-negative");
  GrayImage out(src.width(), src.height());
  box_mean_interleaved(src.values(), src.width(), src.height(), 1, radius, out.values());
  return out;
}

namespace {

constexpr std::array<double, 5> kBinomial = {1.0, 4.0, 6.0, 4.0, 1.0};
constexpr int kMinPyramidSide = 16;

// Smooths with the binomial kernel (weights renormalized at borders) and keeps
// every second sample in both axes.
GrayImage smooth_and_decimate(const GrayImage& src) {
  const int w = src.width();
  const int h = src.height();
  const int ow = w / 2;
  const int oh = h / 2;

  GrayImage horiz(ow, h);
  for (int y = 0; y < h; ++y) {
    auto in = src.row(y);
    auto out = horiz.row(y);
    for (int ox = 0; ox < ow; ++ox) {
      const int cx = 2 * ox;
      double sum = 0.0;
      double norm = 0.0;
      for (int k = -2; k <= 2; ++k) {
        const int x = cx + k;
        if (x < 0 || x >= w) continue;
        sum += kBinomial[k + 2] * in[x];
        norm += kBinomial[k + 2];
      }
      out[ox] = sum / norm;
    }
  }

  GrayImage out(ow, oh);
  for (int oy = 0; oy < oh; ++oy) {
    const int cy = 2 * oy;
    auto dst = out.row(oy);
    double norm = 0.0;
    for (int k = -2; k <= 2; ++k) {
      const int y = cy + k;
      if (y < 0 || y >= h) continue;
      norm += kBinomial[k + 2];
      auto in = horiz.row(y);
      for (int x = 0; x < ow; ++x) dst[x] += kBinomial[k + 2] * in[x];
    }
    for (int x = 0; x < ow; ++x) dst[x] /= norm;
  }
  return out;
}

}  // namespace

ImagePyramid build_pyramid(const GrayImage& src, int max_levels) {
  if (max_levels < 1) throw std::invalid_argument("pyramid needs at least one level");
  if (src.empty()) throw std::invalid_argument("cannot build a pyramid from an empty image");
  ImagePyramid pyramid;
  pyramid.levels.reserve(max_levels);
  pyramid.levels.push_back(src);
  while (static_cast<int>(pyramid.levels.size()) < max_levels) {
    const GrayImage& last = pyramid.levels.back();
    if (last.width() / 2 < kMinPyramidSide || last.height() / 2 < kMinPyramidSide) break;
    pyramid.levels.push_back(smooth_and_decimate(last));
  }
  return pyramid;
}

Frame warp_similarity(const Frame& src, const SimilarityTransform& m, int out_w, int out_h, bool wrap) {
  Frame out;
  warp_similarity_into(src, m, out_w, out_h, wrap, out);
  return out;
}

void warp_similarity_into(const Frame& src, const SimilarityTransform& m, int out_w, int out_h, bool wrap, Frame& out) {
  if (out_w < 1 || out_h < 1) throw std::invalid_argument("warp target must be at least 1x1");
  if (src.empty()) throw std::invalid_argument("cannot warp an empty image");
  if (&src == &out) throw std::invalid_argument("warp output must not alias its source");
  if (!(m.scale() > 0.0) || !std::isfinite(m.scale())) {
    throw std::invalid_argument("warp transform is not invertible");
  }

  const SimilarityTransform inv = m.inverse();
  const int sw = src.width();
  const int sh = src.height();
  const double period_x = sw;
  const double period_y = sh;
  if (!out.same_size(out_w, out_h)) out = Frame(out_w, out_h);

  for (int y = 0; y < out_h; ++y) {
    auto dst = out.row(y);
    for (int x = 0; x < out_w; ++x) {
      const Point2 s = inv.apply({static_cast<double>(x), static_cast<double>(y)});
      int x0, x1, y0, y1;
      double fx, fy;
      if (wrap) {
        const double u = wrap_coord(s.x, period_x);
        const double v = wrap_coord(s.y, period_y);
        x0 = std::min(static_cast<int>(u), sw - 1);
        y0 = std::min(static_cast<int>(v), sh - 1);
        fx = u - x0;
        fy = v - y0;
        x1 = x0 + 1 == sw ? 0 : x0 + 1;
        y1 = y0 + 1 == sh ? 0 : y0 + 1;
      } else {
        const double u = std::clamp(s.x, 0.0, period_x - 1.0);
        const double v = std::clamp(s.y, 0.0, period_y - 1.0);
        x0 = static_cast<int>(u);
        y0 = static_cast<int>(v);
        fx = u - x0;
        fy = v - y0;
        x1 = std::min(x0 + 1, sw - 1);
        y1 = std::min(y0 + 1, sh - 1);
      }
      auto top = src.row(y0);
      auto bottom = src.row(y1);
      for (int c = 0; c < 3; ++c) {
        const double p00 = top[x0 * 3 + c];
        const double p10 = top[x1 * 3 + c];
        const double p01 = bottom[x0 * 3 + c];
        const double p11 = bottom[x1 * 3 + c];
        const double upper = p00 + fx * (p10 - p00);
        const double lower = p01 + fx * (p11 - p01);
        dst[x * 3 + c] = upper + fy * (lower - upper);
      }
    }
  }
}

}  // namespace skyblendr
