#pragma once

// Independent reference implementations and synthetic scene generators used by
// the unit and acceptance suites. Nothing here calls into the filters it checks.

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "skyblendr/imaging.hpp"

namespace skyblendr::oracle {

/// Naive windowed mean over the clipped (2r+1)^2 window.
inline GrayImage naive_box(const GrayImage& src, int r) {
  GrayImage out(src.width(), src.height());
  for (int y = 0; y < src.height(); ++y) {
    for (int x = 0; x < src.width(); ++x) {
      double sum = 0.0;
      int count = 0;
      for (int v = std::max(0, y - r); v <= std::min(src.height() - 1, y + r); ++v) {
        for (int u = std::max(0, x - r); u <= std::min(src.width() - 1, x + r); ++u) {
          sum += src.at(u, v);
          ++count;
        }
      }
      out.at(x, y) = sum / count;
    }
  }
  return out;
}

/// Guided filter with every windowed statistic computed by explicit loops.
inline GrayImage naive_guided(const GrayImage& guide, const GrayImage& src, int r, double eps) {
  const int w = guide.width();
  const int h = guide.height();
  GrayImage a(w, h), b(w, h), out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double si = 0, sp = 0, sii = 0, sip = 0;
      int n = 0;
      for (int v = std::max(0, y - r); v <= std::min(h - 1, y + r); ++v) {
        for (int u = std::max(0, x - r); u <= std::min(w - 1, x + r); ++u) {
          const double I = guide.at(u, v);
          const double p = src.at(u, v);
          si += I;
          sp += p;
          sii += I * I;
          sip += I * p;
          ++n;
        }
      }
      const double mi = si / n, mp = sp / n;
      const double var = sii / n - mi * mi;
      const double cov = sip / n - mi * mp;
      a.at(x, y) = cov / (var + eps);
      b.at(x, y) = mp - a.at(x, y) * mi;
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double sa = 0, sb = 0;
      int n = 0;
      for (int v = std::max(0, y - r); v <= std::min(h - 1, y + r); ++v) {
        for (int u = std::max(0, x - r); u <= std::min(w - 1, x + r); ++u) {
          sa += a.at(u, v);
          sb += b.at(u, v);
          ++n;
        }
      }
      out.at(x, y) = sa / n * guide.at(x, y) + sb / n;
    }
  }
  return out;
}

/// Direct bilinear evaluation of channel c at (x, y); `wrap` tiles, else clamps.
inline double bilinear_at(const Frame& img, double x, double y, int c, bool wrap) {
  const int w = img.width();
  const int h = img.height();
  if (wrap) {
    x = std::fmod(x, w);
    if (x < 0) x += w;
    y = std::fmod(y, h);
    if (y < 0) y += h;
  } else {
    x = std::min(std::max(x, 0.0), w - 1.0);
    y = std::min(std::max(y, 0.0), h - 1.0);
  }
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const double fx = x - x0;
  const double fy = y - y0;
  auto px = [&](int u, int v) {
    if (wrap) {
      u = ((u % w) + w) % w;
      v = ((v % h) + h) % h;
    } else {
      u = std::min(u, w - 1);
      v = std::min(v, h - 1);
    }
    return img.at(u, v, c);
  };
  return (1 - fx) * (1 - fy) * px(x0, y0) + fx * (1 - fy) * px(x0 + 1, y0) + (1 - fx) * fy * px(x0, y0 + 1) +
         fx * fy * px(x0 + 1, y0 + 1);
}

template <int C, typename Tag>
double max_abs_diff(const Image<C, Tag>& a, const Image<C, Tag>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  return m;
}

inline double psnr(const Frame& a, const Frame& b) {
  double se = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) {
    const double d = a.values()[i] - b.values()[i];
    se += d * d;
  }
  const double mse = se / a.values().size();
  return mse == 0.0 ? 1e9 : 10.0 * std::log10(1.0 / mse);
}

inline GrayImage random_gray(int w, int h, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  GrayImage img(w, h);
  for (double& v : img.values()) v = u(rng);
  return img;
}

inline Frame random_frame(int w, int h, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Frame img(w, h);
  for (double& v : img.values()) v = u(rng);
  return img;
}

/// Smooth texture from random Gaussian blobs, evaluated analytically at
/// (x - shift_x, y - shift_y), so shifted copies are exact.
struct BlobTexture {
  struct Blob {
    double x, y, sigma, amplitude;
  };
  std::vector<Blob> blobs;

  BlobTexture(int w, int h, int count, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ux(-20.0, w + 20.0), uy(-20.0, h + 20.0), us(3.0, 7.0), ua(-0.35, 0.35);
    for (int i = 0; i < count; ++i) blobs.push_back({ux(rng), uy(rng), us(rng), ua(rng)});
  }

  double operator()(double x, double y) const {
    double v = 0.5;
    for (const Blob& b : blobs) {
      const double dx = x - b.x, dy = y - b.y;
      v += b.amplitude * std::exp(-(dx * dx + dy * dy) / (2 * b.sigma * b.sigma));
    }
    return std::min(std::max(v, 0.0), 1.0);
  }

  GrayImage render(int w, int h, double shift_x = 0.0, double shift_y = 0.0) const {
    GrayImage img(w, h);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) img.at(x, y) = (*this)(x - shift_x, y - shift_y);
    return img;
  }
};

/// Sky-like texture periodic over (period_w, period_h): a sum of sinusoids with
/// integer frequencies, tinted blue. sample(x, y) is exact at any real position.
struct TileableSky {
  struct Wave {
    int fx, fy;
    double amplitude, phase;
  };
  int period_w, period_h;
  std::vector<Wave> waves;

  TileableSky(int w, int h, std::mt19937_64& rng) : period_w(w), period_h(h) {
    std::uniform_int_distribution<int> fx(4, 14), fy(2, 8);
    std::uniform_real_distribution<double> ph(0.0, 2 * std::numbers::pi), amp(0.03, 0.07), sgn(-1, 1);
    for (int i = 0; i < 6; ++i) {
      waves.push_back({fx(rng) * (sgn(rng) < 0 ? -1 : 1), fy(rng), amp(rng), ph(rng)});
    }
  }

  double intensity(double x, double y) const {
    double v = 0.0;
    for (const Wave& w : waves) {
      v += w.amplitude * std::cos(2 * std::numbers::pi * (w.fx * x / period_w + w.fy * y / period_h) + w.phase);
    }
    return v;
  }

  void sample(double x, double y, double rgb[3]) const {
    const double v = intensity(x, y);
    rgb[0] = std::clamp(0.45 + 1.2 * v, 0.0, 1.0);
    rgb[1] = std::clamp(0.62 + 1.2 * v, 0.0, 1.0);
    rgb[2] = std::clamp(0.88 + 0.8 * v, 0.0, 1.0);
  }

  Frame render() const {
    Frame img(period_w, period_h);
    double rgb[3];
    for (int y = 0; y < period_h; ++y)
      for (int x = 0; x < period_w; ++x) {
        sample(x, y, rgb);
        for (int c = 0; c < 3; ++c) img.at(x, y, c) = rgb[c];
      }
    return img;
  }
};

}  // namespace skyblendr::oracle
