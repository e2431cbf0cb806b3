#include <cstring>

#include <png.h>

#include "camkit/error.hpp"
#include "camkit/io.hpp"
#include "camkit/render.hpp"

namespace camkit {

namespace {

struct PngImage {
  png_image image;
  PngImage() {
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
  }
  ~PngImage() { png_image_free(&image); }
  PngImage(const PngImage&) = delete;
  PngImage& operator=(const PngImage&) = delete;
};

template <typename Img>
std::vector<std::byte> encode(const Img& img, png_uint_32 format, int channels) {
  if (img.height == 0 || img.width == 0 || img.pixels.size() != img.height * img.width * channels) {
    throw ValidationError("image buffer does not match its dimensions");
  }
  PngImage png;
  png.image.width = static_cast<png_uint_32>(img.width);
  png.image.height = static_cast<png_uint_32>(img.height);
  png.image.format = format;
  png_alloc_size_t size = 0;
  const auto stride = static_cast<png_int_32>(img.width * channels);
  if (!png_image_write_to_memory(&png.image, nullptr, &size, 0, img.pixels.data(), stride, nullptr)) {
    throw IoError(std::string("png encode failed: ") + png.image.message);
  }
  std::vector<std::byte> out(size);
  if (!png_image_write_to_memory(&png.image, out.data(), &size, 0, img.pixels.data(), stride, nullptr)) {
    throw IoError(std::string("png encode failed: ") + png.image.message);
  }
  out.resize(size);
  return out;
}

}  // namespace

Image decode_png(std::span<const std::byte> bytes) {
  PngImage png;
  if (!png_image_begin_read_from_memory(&png.image, bytes.data(), bytes.size())) {
    throw ValidationError(std::string("not a readable PNG: ") + png.image.message);
  }
  const bool gray = (png.image.format & PNG_FORMAT_FLAG_COLOR) == 0;
  png.image.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  const std::size_t h = png.image.height;
  const std::size_t w = png.image.width;
  auto finish = [&](std::vector<std::uint8_t>& buffer) {
    if (!png_image_finish_read(&png.image, nullptr, buffer.data(), 0, nullptr)) {
      throw ValidationError(std::string("png decode failed: ") + png.image.message);
    }
  };
  if (gray) {
    GrayImage img(h, w);
    finish(img.pixels);
    return img;
  }
  RgbImage img(h, w);
  finish(img.pixels);
  return img;
}

Image read_png(const std::filesystem::path& path) { return decode_png(read_file(path)); }

std::vector<std::byte> encode_png(const RgbImage& image) { return encode(image, PNG_FORMAT_RGB, 3); }
std::vector<std::byte> encode_png(const GrayImage& image) { return encode(image, PNG_FORMAT_GRAY, 1); }

void write_png(const RgbImage& image, const std::filesystem::path& path) {
  write_file_atomic(path, encode_png(image));
}

}  // namespace camkit
