#include "camkit/render.hpp"

#include <cmath>

#include "camkit/error.hpp"

namespace camkit {

namespace {

std::uint8_t quantize(double x) { return static_cast<std::uint8_t>(std::lround(255.0 * x)); }

double ramp(double v, double centre) { return std::clamp(1.5 - std::abs(4.0 * v - centre), 0.0, 1.0); }

std::uint8_t blend(std::uint8_t base, std::uint8_t color, double alpha) {
  const double v = (1.0 - alpha) * base + alpha * color;
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

void check_overlay(std::size_t h, std::size_t w, const Cam& cam, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ValidationError("overlay alpha must lie in [0,1]");
  if (static_cast<std::size_t>(cam.rows()) != h || static_cast<std::size_t>(cam.cols()) != w) {
    throw ValidationError("cam is " + std::to_string(cam.rows()) + "x" + std::to_string(cam.cols()) +
                          " but the base image is " + std::to_string(h) + "x" + std::to_string(w));
  }
}

}  // namespace

Rgb jet(double v) {
  if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("colormap input must lie in [0,1]");
  return {quantize(ramp(v, 3.0)), quantize(ramp(v, 2.0)), quantize(ramp(v, 1.0))};
}

RgbImage colorize(const Cam& cam) {
  RgbImage out(static_cast<std::size_t>(cam.rows()), static_cast<std::size_t>(cam.cols()));
  for (Eigen::Index r = 0; r < cam.rows(); ++r) {
    for (Eigen::Index c = 0; c < cam.cols(); ++c) {
      const auto rgb = jet(cam(r, c));
      std::copy(rgb.begin(), rgb.end(), out.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c)));
    }
  }
  return out;
}

RgbImage overlay(const RgbImage& base, const Cam& cam, double alpha) {
  check_overlay(base.height, base.width, cam, alpha);
  RgbImage out(base.height, base.width);
  for (std::size_t r = 0; r < base.height; ++r) {
    for (std::size_t c = 0; c < base.width; ++c) {
      const auto rgb = jet(cam(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
      const auto* src = base.at(r, c);
      auto* dst = out.at(r, c);
      for (int k = 0; k < 3; ++k) dst[k] = blend(src[k], rgb[k], alpha);
    }
  }
  return out;
}

RgbImage overlay(const GrayImage& base, const Cam& cam, double alpha) {
  check_overlay(base.height, base.width, cam, alpha);
  RgbImage out(base.height, base.width);
  for (std::size_t r = 0; r < base.height; ++r) {
    for (std::size_t c = 0; c < base.width; ++c) {
      const auto rgb = jet(cam(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
      const auto g = base.at(r, c);
      auto* dst = out.at(r, c);
      for (int k = 0; k < 3; ++k) dst[k] = blend(g, rgb[k], alpha);
    }
  }
  return out;
}

RgbImage overlay(const Image& base, const Cam& cam, double alpha) {
  return std::visit([&](const auto& img) { return overlay(img, cam, alpha); }, base);
}

std::size_t image_height(const Image& image) noexcept {
  return std::visit([](const auto& img) { return img.height; }, image);
}

std::size_t image_width(const Image& image) noexcept {
  return std::visit([](const auto& img) { return img.width; }, image);
}

}  // namespace camkit
