#include <random>

#include <gtest/gtest.h>

#include "camkit/error.hpp"
#include "camkit/render.hpp"

using namespace camkit;

namespace {

const std::filesystem::path kData = CAMKIT_TEST_DATA;

GrayImage gray(std::size_t h, std::size_t w, std::uint8_t v) {
  GrayImage g(h, w);
  std::fill(g.pixels.begin(), g.pixels.end(), v);
  return g;
}

Cam random_cam(std::mt19937_64& rng, Eigen::Index h, Eigen::Index w) {
  std::uniform_real_distribution<double> d(0.0, 1.0);
  Cam c(h, w);
  for (Eigen::Index i = 0; i < c.size(); ++i) c.data()[i] = d(rng);
  return c;
}

}  // namespace

TEST(Jet, Anchors) {
  EXPECT_EQ(jet(0.0), (Rgb{0, 0, 128}));
  EXPECT_EQ(jet(1.0), (Rgb{128, 0, 0}));
  EXPECT_EQ(jet(0.25), (Rgb{0, 128, 255}));
  EXPECT_EQ(jet(0.5), (Rgb{128, 255, 128}));
  EXPECT_EQ(jet(0.75), (Rgb{255, 128, 0}));
}

TEST(Jet, RejectsOutOfRange) {
  EXPECT_THROW(jet(-0.01), ValidationError);
  EXPECT_THROW(jet(1.01), ValidationError);
  EXPECT_THROW(jet(NAN), ValidationError);
  Cam c = Cam::Constant(2, 2, 0.5);
  c(1, 1) = 2.0;
  EXPECT_THROW(colorize(c), ValidationError);
}

TEST(Overlay, AlphaZeroKeepsBase) {
  std::mt19937_64 rng(1);
  GrayImage base(5, 6);
  for (auto& p : base.pixels) p = static_cast<std::uint8_t>(rng());
  const auto out = overlay(base, random_cam(rng, 5, 6), 0.0);
  for (std::size_t r = 0; r < 5; ++r) {
    for (std::size_t c = 0; c < 6; ++c) {
      for (int k = 0; k < 3; ++k) ASSERT_EQ(out.at(r, c)[k], base.at(r, c));
    }
  }
}

TEST(Overlay, AlphaOneIsColormap) {
  std::mt19937_64 rng(2);
  const auto cam = random_cam(rng, 4, 3);
  EXPECT_EQ(overlay(gray(4, 3, 77), cam, 1.0), colorize(cam));
}

TEST(Overlay, DefaultAlphaOnUniformGray) {
  const auto out = overlay(gray(4, 4, 100), Cam::Ones(4, 4), kDefaultOverlayAlpha);
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t c = 0; c < 4; ++c) {
      EXPECT_EQ(out.at(r, c)[0], 111);
      EXPECT_EQ(out.at(r, c)[1], 60);
      EXPECT_EQ(out.at(r, c)[2], 60);
    }
  }
}

TEST(Overlay, RgbBase) {
  RgbImage base(1, 2);
  base.pixels = {10, 20, 30, 200, 100, 0};
  const auto out = overlay(base, Cam::Zero(1, 2), 0.5);
  // jet(0) = (0, 0, 128)
  EXPECT_EQ(out.pixels, (std::vector<std::uint8_t>{5, 10, 79, 100, 50, 64}));
  EXPECT_EQ(overlay(Image{base}, Cam::Zero(1, 2), 0.5), out);
}

TEST(Overlay, Errors) {
  EXPECT_THROW(overlay(gray(4, 4, 0), Cam::Ones(3, 4), 0.4), ValidationError);
  EXPECT_THROW(overlay(gray(4, 4, 0), Cam::Ones(4, 4), 1.5), ValidationError);
  EXPECT_THROW(overlay(gray(4, 4, 0), Cam::Ones(4, 4), -0.1), ValidationError);
  EXPECT_THROW(overlay(gray(4, 4, 0), Cam::Ones(4, 4), NAN), ValidationError);
}

TEST(Overlay, ChannelsBetweenBaseAndColor) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> a(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    GrayImage base(3, 3);
    for (auto& p : base.pixels) p = static_cast<std::uint8_t>(rng());
    const auto cam = random_cam(rng, 3, 3);
    const double lo = a(rng);
    const double hi = std::min(1.0, lo + 0.25);
    const auto out_lo = overlay(base, cam, lo);
    const auto out_hi = overlay(base, cam, hi);
    const auto color = colorize(cam);
    for (std::size_t i = 0; i < out_lo.pixels.size(); ++i) {
      const int b = base.pixels[i / 3];
      const int c = color.pixels[i];
      ASSERT_GE(out_lo.pixels[i], std::min(b, c));
      ASSERT_LE(out_lo.pixels[i], std::max(b, c));
      // Larger alpha moves each channel no further from the colormap.
      ASSERT_LE(std::abs(out_hi.pixels[i] - c), std::abs(out_lo.pixels[i] - c) + 1);
    }
  }
}

TEST(Png, RoundTripRgb) {
  std::mt19937_64 rng(4);
  RgbImage img(7, 5);
  for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng());
  const auto decoded = decode_png(encode_png(img));
  ASSERT_TRUE(std::holds_alternative<RgbImage>(decoded));
  EXPECT_EQ(std::get<RgbImage>(decoded), img);
}

TEST(Png, RoundTripGray) {
  GrayImage img(3, 9);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) img.pixels[i] = static_cast<std::uint8_t>(i * 9);
  const auto decoded = decode_png(encode_png(img));
  ASSERT_TRUE(std::holds_alternative<GrayImage>(decoded));
  EXPECT_EQ(std::get<GrayImage>(decoded), img);
}

TEST(Png, ReadsFixture) {
  const auto img = read_png(kData / "images/xray_8x8.png");
  ASSERT_TRUE(std::holds_alternative<GrayImage>(img));
  const auto& g = std::get<GrayImage>(img);
  EXPECT_EQ(image_height(img), 8u);
  EXPECT_EQ(image_width(img), 8u);
  for (std::size_t r = 0; r < 8; ++r) {
    for (std::size_t c = 0; c < 8; ++c) EXPECT_EQ(g.at(r, c), (r * 8 + c) * 4);
  }
}

TEST(Png, WriteIsAtomicAndReadable) {
  const auto dir = std::filesystem::temp_directory_path() / ("camkit_render_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()));
  std::filesystem::create_directories(dir);
  RgbImage img(2, 2);
  img.pixels = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
  write_png(img, dir / "out.png");
  EXPECT_EQ(std::get<RgbImage>(read_png(dir / "out.png")), img);
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++files;
  EXPECT_EQ(files, 1u);
  std::filesystem::remove_all(dir);
}

TEST(Png, RejectsGarbage) {
  const std::vector<std::byte> junk(64, std::byte{0x42});
  EXPECT_THROW(decode_png(junk), ValidationError);
  EXPECT_THROW(read_png(kData / "images/does_not_exist.png"), IoError);
}
