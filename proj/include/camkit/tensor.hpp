#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace camkit {

using RowMatrixXf = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Dense row-major f32 array. Shape is non-empty, every extent >= 1 and the
// element count matches. Finiteness is checked at the file boundary
// (write_tensor / read_tensor) and by validate(CamBundle).
class Tensor {
 public:
  using Shape = std::vector<std::size_t>;

  Tensor(Shape shape, std::vector<float> data);

  // Zero-filled tensor of the given shape.
  static Tensor zeros(Shape shape);

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t extent(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const noexcept { return data_.size(); }

  std::span<const float> data() const noexcept { return data_; }
  std::span<float> data() noexcept { return data_; }

  bool all_finite() const noexcept;

  // The tensor viewed as a rows x cols row-major matrix; rows * cols must
  // equal size().
  Eigen::Map<const RowMatrixXf> matrix(Eigen::Index rows, Eigen::Index cols) const;

 private:
  Shape shape_;
  std::vector<float> data_;
};

// Shape equality plus bit-pattern equality of every element.
bool bitwise_equal(const Tensor& a, const Tensor& b) noexcept;

// CAMT container: "CAMT", u16 version (1), u8 dtype (0 = f32), u8 rank,
// rank x u64 extents, then the f32 payload. All integers little-endian.
inline constexpr std::uint16_t kCamtVersion = 1;
inline constexpr std::uint8_t kCamtDtypeF32 = 0;

std::size_t camt_header_size(std::size_t rank) noexcept;

std::vector<std::byte> encode_tensor(const Tensor& t);
Tensor decode_tensor(std::span<const std::byte> bytes);

void write_tensor(const Tensor& t, const std::filesystem::path& destination);
Tensor read_tensor(const std::filesystem::path& source);

enum class LayerKind { conv, vit_tokens };

const char* to_string(LayerKind kind) noexcept;

struct GridShape {
  std::size_t height = 0;
  std::size_t width = 0;

  std::size_t cells() const noexcept { return height * width; }
  friend bool operator==(const GridShape&, const GridShape&) = default;
};

using ImageSize = GridShape;

// One explanation request as exported by a framework adapter.
struct CamBundle {
  LayerKind kind;
  Tensor activations;
  Tensor gradients;
  int class_index = 0;
  std::string image_path;
  ImageSize image_size;
  std::optional<GridShape> patch_grid;
  std::string model_name;
};

// Cross-field checks: matching shapes, rank by kind, patch grid covers N,
// finite values. Throws ValidationError.
void validate(const CamBundle& bundle);

// Parses a bundle manifest (JSON); tensor paths resolve against the
// manifest's directory. Throws ValidationError, FormatError or IoError.
CamBundle load_bundle(const std::filesystem::path& manifest);

}  // namespace camkit
