#include "skyblendr/image_io.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include <cctype>
#include <cstdint>
#include <stdexcept>

namespace skyblendr {

std::string format_frame_path(const std::string& pattern, int index) {
  if (index < 0) throw std::invalid_argument("frame index must be non-negative");
  std::string out;
  int conversions = 0;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (pattern[i] != '%') {
      out += pattern[i];
      continue;
    }
    if (i + 1 < pattern.size() && pattern[i + 1] == '%') {
      out += '%';
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    bool zero_pad = false;
    if (j < pattern.size() && pattern[j] == '0') {
      zero_pad = true;
      ++j;
    }
    int width = 0;
    while (j < pattern.size() && std::isdigit(static_cast<unsigned char>(pattern[j]))) {
      width = width * 10 + (pattern[j] - '0');
      ++j;
    }
    if (j >= pattern.size() || pattern[j] != 'd' || width > 32) {
      throw std::invalid_argument("frame pattern '" + pattern + "' has an unsupported conversion");
    }
    std::string digits = std::to_string(index);
    if (digits.size() < static_cast<std::size_t>(width)) digits.insert(0, width - digits.size(), zero_pad ? '0' : ' ');
    out += digits;
    ++conversions;
    i = j;
  }
  if (conversions != 1) {
    throw std::invalid_argument("frame pattern '" + pattern + "' must contain exactly one %d conversion");
  }
  return out;
}

namespace {

cv::Mat read_raw(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) {
    throw std::runtime_error("image file not found: " + path.string());
  }
  cv::Mat raw = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (raw.empty()) throw std::runtime_error("could not decode image: " + path.string());
  if (raw.depth() != CV_8U && raw.depth() != CV_16U) {
    throw std::runtime_error("unsupported bit depth in " + path.string() + " (expected 8 or 16 bit)");
  }
  return raw;
}

double channel_value(const cv::Mat& raw, int x, int y, int c) {
  const int cn = raw.channels();
  if (raw.depth() == CV_8U) return raw.ptr<std::uint8_t>(y)[x * cn + c] / 255.0;
  return raw.ptr<std::uint16_t>(y)[x * cn + c] / 65535.0;
}

}  // namespace

Frame read_frame(const std::filesystem::path& path) {
  const cv::Mat raw = read_raw(path);
  const int cn = raw.channels();
  if (cn != 1 && cn != 3 && cn != 4) {
    throw std::runtime_error("unsupported channel count " + std::to_string(cn) + " in " + path.string());
  }
  Frame frame(raw.cols, raw.rows);
  for (int y = 0; y < raw.rows; ++y) {
    auto dst = frame.row(y);
    for (int x = 0; x < raw.cols; ++x) {
      if (cn == 1) {
        const double v = channel_value(raw, x, y, 0);
        dst[3 * x] = dst[3 * x + 1] = dst[3 * x + 2] = v;
      } else {
        // OpenCV stores BGR(A).
        dst[3 * x] = channel_value(raw, x, y, 2);
        dst[3 * x + 1] = channel_value(raw, x, y, 1);
        dst[3 * x + 2] = channel_value(raw, x, y, 0);
      }
    }
  }
  return frame;
}

GrayImage read_single_channel(const std::filesystem::path& path) {
  const cv::Mat raw = read_raw(path);
  if (raw.channels() != 1) {
    throw std::runtime_error("expected a single-channel image but " + path.string() + " has " +
                             std::to_string(raw.channels()) + " channels");
  }
  GrayImage out(raw.cols, raw.rows);
  for (int y = 0; y < raw.rows; ++y) {
    auto dst = out.row(y);
    for (int x = 0; x < raw.cols; ++x) dst[x] = channel_value(raw, x, y, 0);
  }
  return out;
}

void write_frame(const std::filesystem::path& path, const Frame& frame) {
  cv::Mat raw(frame.height(), frame.width(), CV_8UC3);
  for (int y = 0; y < frame.height(); ++y) {
    auto src = frame.row(y);
    auto* dst = raw.ptr<std::uint8_t>(y);
    for (int x = 0; x < frame.width(); ++x) {
      dst[3 * x] = to_u8(src[3 * x + 2]);
      dst[3 * x + 1] = to_u8(src[3 * x + 1]);
      dst[3 * x + 2] = to_u8(src[3 * x]);
    }
  }
  if (!cv::imwrite(path.string(), raw)) throw std::runtime_error("could not write image: " + path.string());
}

void write_gray(const std::filesystem::path& path, const GrayImage& image, int bits) {
  if (bits != 8 && bits != 16) throw std::invalid_argument("gray images are written with 8 or 16 bits");
  cv::Mat raw(image.height(), image.width(), bits == 8 ? CV_8UC1 : CV_16UC1);
  for (int y = 0; y < image.height(); ++y) {
    auto src = image.row(y);
    for (int x = 0; x < image.width(); ++x) {
      const double v = std::clamp(src[x], 0.0, 1.0);
      if (bits == 8) {
        raw.ptr<std::uint8_t>(y)[x] = to_u8(v);
      } else {
        raw.ptr<std::uint16_t>(y)[x] = static_cast<std::uint16_t>(std::lround(v * 65535.0));
      }
    }
  }
  if (!cv::imwrite(path.string(), raw)) throw std::runtime_error("could not write image: " + path.string());
}

}  // namespace skyblendr
