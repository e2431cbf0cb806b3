#pragma once

#include <cstdint>
#include <string_view>

namespace camkit {

enum class Label : std::uint8_t { normal = 0, pneumonia = 1 };

constexpr int to_int(Label l) noexcept { return static_cast<int>(l); }
constexpr Label other(Label l) noexcept {
  return l == Label::normal ? Label::pneumonia : Label::normal;
}

std::string_view to_string(Label l) noexcept;

// Accepts 0/1 or NORMAL/PNEUMONIA (case-insensitive). Throws ValidationError.
Label parse_label(std::string_view text);

}  // namespace camkit
