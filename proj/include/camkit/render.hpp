#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <variant>
#include <vector>

#include "camkit/gradcam.hpp"

namespace camkit {

// 8-bit interleaved RGB, row-major.
struct RgbImage {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::uint8_t> pixels;  // height * width * 3

  RgbImage() = default;
  RgbImage(std::size_t h, std::size_t w) : height(h), width(w), pixels(h * w * 3, 0) {}

  std::uint8_t* at(std::size_t row, std::size_t col) { return &pixels[(row * width + col) * 3]; }
  const std::uint8_t* at(std::size_t row, std::size_t col) const {
    return &pixels[(row * width + col) * 3];
  }
  friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

struct GrayImage {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::uint8_t> pixels;  // height * width

  GrayImage() = default;
  GrayImage(std::size_t h, std::size_t w) : height(h), width(w), pixels(h * w, 0) {}

  std::uint8_t at(std::size_t row, std::size_t col) const { return pixels[row * width + col]; }
  friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

using Image = std::variant<GrayImage, RgbImage>;

using Rgb = std::array<std::uint8_t, 3>;

// Closed-form jet: channel c = clamp(1.5 - |4v - k|, 0, 1) with k = 3, 2, 1
// for r, g, b, quantized as round(255 x). v must lie in [0,1].
Rgb jet(double v);

// Throws ValidationError for values outside [0,1].
RgbImage colorize(const Cam& cam);

// round((1 - alpha) base + alpha jet(cam)) per channel. cam must already be
// the size of base; nothing is resized here.
RgbImage overlay(const GrayImage& base, const Cam& cam, double alpha);
RgbImage overlay(const RgbImage& base, const Cam& cam, double alpha);
RgbImage overlay(const Image& base, const Cam& cam, double alpha);

inline constexpr double kDefaultOverlayAlpha = 0.4;

// Reads any PNG; grayscale inputs stay GrayImage, everything else is
// converted to RGB (alpha composited over black by libpng).
Image read_png(const std::filesystem::path& path);
Image decode_png(std::span<const std::byte> bytes);

// 8-bit RGB, non-interlaced.
std::vector<std::byte> encode_png(const RgbImage& image);
std::vector<std::byte> encode_png(const GrayImage& image);
void write_png(const RgbImage& image, const std::filesystem::path& path);

std::size_t image_height(const Image& image) noexcept;
std::size_t image_width(const Image& image) noexcept;

}  // namespace camkit
