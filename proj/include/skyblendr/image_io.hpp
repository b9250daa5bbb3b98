#pragma once

#include <filesystem>
#include <string>

#include "skyblendr/imaging.hpp"

namespace skyblendr {

/// Expands a printf-style frame pattern holding exactly one %d / %0Nd
/// conversion ("%%" is a literal percent). Throws std::invalid_argument on
/// any other conversion.
std::string format_frame_path(const std::string& pattern, int index);

/// Reads an 8- or 16-bit gray, RGB or RGBA raster into an RGB frame.
/// Gray input is replicated to three channels; alpha is dropped.
Frame read_frame(const std::filesystem::path& path);

/// Reads a single-channel 8- or 16-bit raster, scaled 0..max -> 0..1.
/// Throws std::runtime_error naming the channel count for anything else.
GrayImage read_single_channel(const std::filesystem::path& path);

/// Writes 8-bit RGB (format from the extension; PNG is lossless).
void write_frame(const std::filesystem::path& path, const Frame& frame);

/// Writes a single-channel raster with the given bit depth (8 or 16).
void write_gray(const std::filesystem::path& path, const GrayImage& image, int bits = 8);

}  // namespace skyblendr
