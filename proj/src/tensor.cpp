#include "camkit/tensor.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>

#include "camkit/error.hpp"
#include "camkit/io.hpp"

namespace camkit {

const char* to_string(FormatErrc code) noexcept {
  switch (code) {
    case FormatErrc::truncated_header: return "truncated header";
    case FormatErrc::bad_magic: return "bad magic";
    case FormatErrc::unsupported_version: return "unsupported version";
    case FormatErrc::unsupported_dtype: return "unsupported dtype";
    case FormatErrc::bad_rank: return "bad rank";
    case FormatErrc::bad_shape: return "bad shape";
    case FormatErrc::length_mismatch: return "length mismatch";
    case FormatErrc::non_finite: return "non-finite value";
  }
  return "format error";
}

namespace {

constexpr std::byte kMagic[4] = {std::byte{'C'}, std::byte{'A'}, std::byte{'M'}, std::byte{'T'}};
constexpr std::size_t kFixedHeader = 4 + 2 + 1 + 1;

// Element count, or nullopt when the product overflows size_t.
std::optional<std::size_t> element_count(const Tensor::Shape& shape) {
  std::size_t n = 1;
  for (auto e : shape) {
    if (e != 0 && n > std::numeric_limits<std::size_t>::max() / e) return std::nullopt;
    n *= e;
  }
  return n;
}

template <typename UInt>
void put_le(std::vector<std::byte>& out, UInt v) {
  for (std::size_t i = 0; i < sizeof(UInt); ++i) {
    out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xFF));
  }
}

template <typename UInt>
UInt get_le(std::span<const std::byte> in, std::size_t offset) {
  UInt v = 0;
  for (std::size_t i = 0; i < sizeof(UInt); ++i) {
    v |= static_cast<UInt>(std::to_integer<unsigned>(in[offset + i])) << (8 * i);
  }
  return v;
}

}  // namespace

Tensor::Tensor(Shape shape, std::vector<float> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (shape_.empty()) throw ValidationError("tensor shape must be non-empty");
  for (auto e : shape_) {
    if (e == 0) throw ValidationError("tensor extents must be >= 1");
  }
  const auto n = element_count(shape_);
  if (!n || *n != data_.size()) {
    throw ValidationError("tensor shape does not match element count " +
                          std::to_string(data_.size()));
  }
}

Tensor Tensor::zeros(Shape shape) {
  const auto n = element_count(shape);
  if (!n) throw ValidationError("tensor shape overflows");
  return Tensor(std::move(shape), std::vector<float>(*n, 0.0f));
}

bool Tensor::all_finite() const noexcept {
  for (float v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Eigen::Map<const RowMatrixXf> Tensor::matrix(Eigen::Index rows, Eigen::Index cols) const {
  if (rows < 1 || cols < 1 || static_cast<std::size_t>(rows * cols) != data_.size()) {
    throw ValidationError("matrix view does not cover the tensor");
  }
  return Eigen::Map<const RowMatrixXf>(data_.data(), rows, cols);
}

bool bitwise_equal(const Tensor& a, const Tensor& b) noexcept {
  if (a.shape() != b.shape()) return false;
  const auto da = a.data();
  const auto db = b.data();
  return std::memcmp(da.data(), db.data(), da.size_bytes()) == 0;
}

std::size_t camt_header_size(std::size_t rank) noexcept { return kFixedHeader + 8 * rank; }

std::vector<std::byte> encode_tensor(const Tensor& t) {
  if (!t.all_finite()) throw ValidationError("refusing to write non-finite tensor values");
  if (t.rank() > std::numeric_limits<std::uint8_t>::max()) {
    throw ValidationError("tensor rank exceeds 255");
  }
  std::vector<std::byte> out;
  out.reserve(camt_header_size(t.rank()) + 4 * t.size());
  for (auto b : kMagic) out.push_back(b);
  put_le<std::uint16_t>(out, kCamtVersion);
  put_le<std::uint8_t>(out, kCamtDtypeF32);
  put_le<std::uint8_t>(out, static_cast<std::uint8_t>(t.rank()));
  for (auto e : t.shape()) put_le<std::uint64_t>(out, e);
  for (float v : t.data()) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

Tensor decode_tensor(std::span<const std::byte> bytes) {
  if (bytes.size() < kFixedHeader) {
    throw FormatError(FormatErrc::truncated_header, "file shorter than fixed header");
  }
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw FormatError(FormatErrc::bad_magic, "expected \"CAMT\"");
  }
  const auto version = get_le<std::uint16_t>(bytes, 4);
  if (version != kCamtVersion) {
    throw FormatError(FormatErrc::unsupported_version, "version " + std::to_string(version));
  }
  const auto dtype = get_le<std::uint8_t>(bytes, 6);
  if (dtype != kCamtDtypeF32) {
    throw FormatError(FormatErrc::unsupported_dtype, "dtype " + std::to_string(dtype));
  }
  const std::size_t rank = get_le<std::uint8_t>(bytes, 7);
  if (rank == 0) throw FormatError(FormatErrc::bad_rank, "rank 0");
  const std::size_t header = camt_header_size(rank);
  if (bytes.size() < header) {
    throw FormatError(FormatErrc::truncated_header,
                      "rank " + std::to_string(rank) + " needs " + std::to_string(header) +
                          " header bytes");
  }

  Tensor::Shape shape(rank);
  for (std::size_t i = 0; i < rank; ++i) {
    const auto e = get_le<std::uint64_t>(bytes, kFixedHeader + 8 * i);
    if (e == 0) throw FormatError(FormatErrc::bad_shape, "zero extent on axis " + std::to_string(i));
    if (e > std::numeric_limits<std::size_t>::max()) {
      throw FormatError(FormatErrc::bad_shape, "extent overflows");
    }
    shape[i] = static_cast<std::size_t>(e);
  }
  const auto count = element_count(shape);
  const std::size_t payload = bytes.size() - header;
  if (!count || *count > payload / 4 || *count * 4 != payload) {
    throw FormatError(FormatErrc::length_mismatch,
                      "payload of " + std::to_string(payload) + " bytes does not match shape");
  }

  std::vector<float> data(*count);
  for (std::size_t i = 0; i < data.size(); ++i) {
    data[i] = std::bit_cast<float>(get_le<std::uint32_t>(bytes, header + 4 * i));
    if (!std::isfinite(data[i])) {
      throw FormatError(FormatErrc::non_finite, "element " + std::to_string(i));
    }
  }
  return Tensor(std::move(shape), std::move(data));
}

void write_tensor(const Tensor& t, const std::filesystem::path& destination) {
  write_file_atomic(destination, encode_tensor(t));
}

Tensor read_tensor(const std::filesystem::path& source) {
  return decode_tensor(read_file(source));
}

}  // namespace camkit
