#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace arcjet {

/// Row-major interleaved 8-bit RGB image.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  RgbImage() = default;
  RgbImage(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, fill) {}

  std::uint8_t* at(int x, int y) { return pixels.data() + (static_cast<std::size_t>(y) * width + x) * 3; }
  const std::uint8_t* at(int x, int y) const {
    return pixels.data() + (static_cast<std::size_t>(y) * width + x) * 3;
  }

  bool operator==(const RgbImage&) const = default;
};

/// ITU-R 601 luma, rounded to the nearest integer.
inline int luminance(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  return static_cast<int>(0.299 * r + 0.587 * g + 0.114 * b + 0.5);
}

/// Unrounded ITU-R 601 luma, for averaging and sub-pixel work.
inline double luminance_exact(const std::uint8_t* rgb) { return 0.299 * rgb[0] + 0.587 * rgb[1] + 0.114 * rgb[2]; }

namespace png {

/// Decodes any PNG into 8-bit RGB (alpha dropped, palettes/gray expanded).
/// Throws Error{DecodeFailure} on corrupt input and Error{IoFailure} when unreadable.
RgbImage read_file(const std::filesystem::path& path);
RgbImage decode(std::span<const std::uint8_t> bytes);

void write_file(const std::filesystem::path& path, const RgbImage& image);
std::vector<std::uint8_t> encode(const RgbImage& image);

}  // namespace png

}  // namespace arcjet
