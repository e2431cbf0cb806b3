#include <bit>
#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "camkit/error.hpp"
#include "camkit/io.hpp"
#include "camkit/tensor.hpp"

namespace fs = std::filesystem;
using namespace camkit;

namespace {

const fs::path kData = CAMKIT_TEST_DATA;

fs::path temp_dir() {
  auto dir = fs::temp_directory_path() / ("camkit_tensorio_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

FormatErrc decode_error(std::span<const std::byte> bytes) {
  try {
    decode_tensor(bytes);
  } catch (const FormatError& e) {
    return e.code();
  }
  ADD_FAILURE() << "decode succeeded";
  return FormatErrc::bad_magic;
}

// Random finite float from arbitrary bit patterns (subnormals and -0 included).
float random_finite(std::mt19937_64& rng) {
  for (;;) {
    const auto bits = static_cast<std::uint32_t>(rng());
    const float f = std::bit_cast<float>(bits);
    if (std::isfinite(f)) return f;
  }
}

Tensor random_tensor(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> rank_dist(1, 4);
  std::uniform_int_distribution<std::size_t> extent_dist(1, 16);
  Tensor::Shape shape(rank_dist(rng));
  std::size_t n = 1;
  for (auto& e : shape) {
    e = extent_dist(rng);
    n *= e;
  }
  std::vector<float> data(n);
  for (auto& v : data) v = random_finite(rng);
  return Tensor(std::move(shape), std::move(data));
}

}  // namespace

TEST(Tensor, ConstructorEnforcesShape) {
  EXPECT_THROW(Tensor({}, {}), ValidationError);
  EXPECT_THROW(Tensor({2, 0}, {}), ValidationError);
  EXPECT_THROW(Tensor({2, 2}, {1, 2, 3}), ValidationError);
  const Tensor t({2, 3}, {1, 2, 3, 4, 5, 6});
  EXPECT_EQ(t.rank(), 2u);
  EXPECT_EQ(t.size(), 6u);
  EXPECT_EQ(t.matrix(2, 3)(1, 0), 4.0f);
  EXPECT_THROW(t.matrix(3, 3), ValidationError);
}

TEST(Camt, Shape2x2Layout) {
  const Tensor t({2, 2}, {1, 2, 3, 4});
  const auto bytes = encode_tensor(t);
  // magic 4 + version 2 + dtype 1 + rank 1 + 2 x u64 + 4 x f32
  ASSERT_EQ(bytes.size(), 4u + 2 + 1 + 1 + 16 + 16);
  EXPECT_EQ(camt_header_size(2), 24u);
  EXPECT_EQ(std::to_integer<char>(bytes[0]), 'C');
  EXPECT_EQ(std::to_integer<char>(bytes[3]), 'T');
  EXPECT_EQ(std::to_integer<int>(bytes[4]), 1);  // version, little-endian
  EXPECT_EQ(std::to_integer<int>(bytes[5]), 0);
  EXPECT_EQ(std::to_integer<int>(bytes[6]), 0);  // f32
  EXPECT_EQ(std::to_integer<int>(bytes[7]), 2);  // rank
  // Identical to the independently written fixture.
  EXPECT_EQ(bytes, read_file(kData / "tensors/shape2x2.camt"));
}

TEST(Camt, SingleZeroPayload) {
  const auto bytes = encode_tensor(Tensor({1}, {0.0f}));
  ASSERT_EQ(bytes.size(), camt_header_size(1) + 4);
  for (std::size_t i = camt_header_size(1); i < bytes.size(); ++i) EXPECT_EQ(bytes[i], std::byte{0});
  EXPECT_EQ(bytes, read_file(kData / "tensors/zero1.camt"));
}

TEST(Camt, FileRoundTrip) {
  const auto dir = temp_dir();
  const Tensor t({3, 1, 2}, {-1.5f, 0.0f, -0.0f, 1e-40f, 3.25f, 1e30f});
  write_tensor(t, dir / "t.camt");
  EXPECT_TRUE(bitwise_equal(read_tensor(dir / "t.camt"), t));
  fs::remove_all(dir);
}

TEST(Camt, RandomRoundTripIsBitwise) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 1000; ++i) {
    const auto t = random_tensor(rng);
    ASSERT_TRUE(bitwise_equal(decode_tensor(encode_tensor(t)), t)) << "case " << i;
  }
}

TEST(Camt, ReadErrors) {
  EXPECT_EQ(decode_error(read_file(kData / "tensors/bad_magic.camt")), FormatErrc::bad_magic);
  EXPECT_EQ(decode_error(read_file(kData / "tensors/short_payload.camt")), FormatErrc::length_mismatch);
  EXPECT_EQ(decode_error(read_file(kData / "tensors/nan.camt")), FormatErrc::non_finite);
  EXPECT_EQ(decode_error(read_file(kData / "tensors/version2.camt")), FormatErrc::unsupported_version);
  EXPECT_THROW(read_tensor(kData / "tensors/does_not_exist.camt"), IoError);

  auto bytes = encode_tensor(Tensor({2}, {1, 2}));
  bytes[6] = std::byte{1};
  EXPECT_EQ(decode_error(bytes), FormatErrc::unsupported_dtype);
  bytes[6] = std::byte{0};
  bytes[7] = std::byte{0};
  EXPECT_EQ(decode_error(bytes), FormatErrc::bad_rank);
  EXPECT_EQ(decode_error(std::span(bytes).first(5)), FormatErrc::truncated_header);
}

TEST(Camt, WriteRejectsNonFinite) {
  const Tensor t({2}, {1.0f, std::numeric_limits<float>::infinity()});
  EXPECT_THROW(encode_tensor(t), ValidationError);
  const auto dir = temp_dir();
  EXPECT_THROW(write_tensor(t, dir / "inf.camt"), ValidationError);
  EXPECT_FALSE(fs::exists(dir / "inf.camt"));
  fs::remove_all(dir);
}

// Every single-byte mutation and truncation either yields a typed error or
// decodes to exactly what the mutated bytes say.
TEST(Camt, MutatedHeadersNeverCrash) {
  const auto valid = encode_tensor(Tensor({2, 3}, {1, 2, 3, 4, 5, 6}));
  std::size_t errors = 0;
  for (std::size_t pos = 0; pos < valid.size(); ++pos) {
    for (unsigned delta : {0x01u, 0x80u, 0xFFu}) {
      auto bytes = valid;
      bytes[pos] ^= std::byte(delta);
      try {
        const auto t = decode_tensor(bytes);
        EXPECT_EQ(encode_tensor(t), bytes);
      } catch (const FormatError&) {
        ++errors;
      }
    }
  }
  for (std::size_t len = 0; len < valid.size(); ++len) {
    EXPECT_THROW(decode_tensor(std::span(valid).first(len)), FormatError);
  }
  EXPECT_GT(errors, 0u);
}

TEST(Bundle, ConvManifest) {
  const auto b = load_bundle(kData / "bundles/conv_877/bundle.json");
  EXPECT_EQ(b.kind, LayerKind::conv);
  EXPECT_EQ(b.activations.shape(), (Tensor::Shape{8, 7, 7}));
  EXPECT_EQ(b.gradients.shape(), (Tensor::Shape{8, 7, 7}));
  EXPECT_EQ(b.class_index, 1);
  EXPECT_EQ(b.image_size, (ImageSize{224, 224}));
  EXPECT_FALSE(b.patch_grid.has_value());
}

TEST(Bundle, VitManifestGrid) {
  const auto b = load_bundle(kData / "bundles/vit_196/bundle.json");
  EXPECT_EQ(b.kind, LayerKind::vit_tokens);
  ASSERT_TRUE(b.patch_grid.has_value());
  EXPECT_EQ(b.patch_grid->cells(), 196u);
  EXPECT_EQ(b.activations.extent(0), 196u);
}

TEST(Bundle, Errors) {
  EXPECT_THROW(load_bundle(kData / "bundles/vit_196_badgrid/bundle.json"), ValidationError);
  EXPECT_THROW(load_bundle(kData / "bundles/missing_field/bundle.json"), ValidationError);
  EXPECT_THROW(load_bundle(kData / "bundles/shape_mismatch/bundle.json"), ValidationError);
  EXPECT_THROW(load_bundle(kData / "bundles/rank_mismatch/bundle.json"), ValidationError);
  EXPECT_THROW(load_bundle(kData / "bundles/nope/bundle.json"), IoError);
}

TEST(Bundle, MissingFieldNamesTheField) {
  try {
    load_bundle(kData / "bundles/missing_field/bundle.json");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("class_index"), std::string::npos);
  }
}
