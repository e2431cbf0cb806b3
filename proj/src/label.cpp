#include "camkit/label.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "camkit/error.hpp"

namespace camkit {

std::string_view to_string(Label l) noexcept {
  return l == Label::normal ? "NORMAL" : "PNEUMONIA";
}

Label parse_label(std::string_view text) {
  std::string upper(text);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "0" || upper == "NORMAL") return Label::normal;
  if (upper == "1" || upper == "PNEUMONIA") return Label::pneumonia;
  throw ValidationError("invalid label '" + std::string(text) + "'");
}

}  // namespace camkit
