#include <png.h>

#include <cstring>
#include <fstream>
#include <iterator>

#include "arcjet/error.hpp"
#include "arcjet/image.hpp"

namespace arcjet::png {

namespace {

RgbImage finish_read(png_image& img, const std::string& what) {
  img.format = PNG_FORMAT_RGB;
  RgbImage out;
  out.width = static_cast<int>(img.width);
  out.height = static_cast<int>(img.height);
  out.pixels.resize(PNG_IMAGE_SIZE(img));
  // Composite any alpha onto black so that "alpha ignored" is deterministic.
  png_color black{0, 0, 0};
  if (!png_image_finish_read(&img, &black, out.pixels.data(), 0, nullptr)) {
    std::string msg = img.message;
    png_image_free(&img);
    throw Error(ErrorCode::DecodeFailure, what + ": " + msg);
  }
  return out;
}

}  // namespace

RgbImage decode(std::span<const std::uint8_t> bytes) {
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size())) {
    throw Error(ErrorCode::DecodeFailure, std::string("png: ") + img.message);
  }
  return finish_read(img, "png");
}

RgbImage read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size())) {
    throw Error(ErrorCode::DecodeFailure, path.string() + ": " + img.message);
  }
  return finish_read(img, path.string());
}

namespace {

void append_bytes(png_structp png_ptr, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png_ptr));
  out->insert(out->end(), data, data + length);
}

void flush_nothing(png_structp) {}

}  // namespace

std::vector<std::uint8_t> encode(const RgbImage& image) {
  if (image.width <= 0 || image.height <= 0) throw Error(ErrorCode::IoFailure, "png encode: empty image");
  png_structp png_ptr = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png_ptr) throw Error(ErrorCode::IoFailure, "png encode: out of memory");
  png_infop info_ptr = png_create_info_struct(png_ptr);
  if (!info_ptr) {
    png_destroy_write_struct(&png_ptr, nullptr);
    throw Error(ErrorCode::IoFailure, "png encode: out of memory");
  }
  std::vector<std::uint8_t> out;
  std::vector<png_bytep> rows(static_cast<std::size_t>(image.height));
  for (int y = 0; y < image.height; ++y) {
    rows[static_cast<std::size_t>(y)] = const_cast<png_bytep>(image.pixels.data() + static_cast<std::size_t>(y) * image.width * 3);
  }
  if (setjmp(png_jmpbuf(png_ptr))) {
    png_destroy_write_struct(&png_ptr, &info_ptr);
    throw Error(ErrorCode::IoFailure, "png encode failed");
  }
  png_set_write_fn(png_ptr, &out, append_bytes, flush_nothing);
  png_set_compression_level(png_ptr, 1);
  png_set_IHDR(png_ptr, info_ptr, static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_rows(png_ptr, info_ptr, rows.data());
  png_write_png(png_ptr, info_ptr, PNG_TRANSFORM_IDENTITY, nullptr);
  png_destroy_write_struct(&png_ptr, &info_ptr);
  return out;
}

void write_file(const std::filesystem::path& path, const RgbImage& image) {
  auto bytes = encode(image);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoFailure, "short write " + path.string());
}

}  // namespace arcjet::png
