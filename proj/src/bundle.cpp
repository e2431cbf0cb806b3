#include <json.hpp>

#include "camkit/error.hpp"
#include "camkit/io.hpp"
#include "camkit/tensor.hpp"

namespace camkit {

namespace fs = std::filesystem;
using nlohmann::json;

const char* to_string(LayerKind kind) noexcept {
  return kind == LayerKind::conv ? "conv" : "vit_tokens";
}

void validate(const CamBundle& b) {
  const auto& a = b.activations;
  const auto& g = b.gradients;
  if (a.shape() != g.shape()) throw ValidationError("activations and gradients differ in shape");
  if (b.kind == LayerKind::conv && a.rank() != 3) {
    throw ValidationError("conv bundle needs rank-3 (C,H,W) tensors, got rank " +
                          std::to_string(a.rank()));
  }
  if (b.kind == LayerKind::vit_tokens) {
    if (a.rank() != 2) {
      throw ValidationError("vit_tokens bundle needs rank-2 (N,C) tensors, got rank " +
                            std::to_string(a.rank()));
    }
    if (b.patch_grid && b.patch_grid->cells() != a.extent(0)) {
      throw ValidationError("patch_grid " + std::to_string(b.patch_grid->height) + "x" +
                            std::to_string(b.patch_grid->width) + " does not cover N=" +
                            std::to_string(a.extent(0)) + " tokens");
    }
  }
  if (b.class_index < 0) throw ValidationError("class_index must be >= 0");
  if (b.image_size.height == 0 || b.image_size.width == 0) {
    throw ValidationError("image_size extents must be >= 1");
  }
  if (!a.all_finite() || !g.all_finite()) throw ValidationError("bundle tensors contain NaN/Inf");
}

namespace {

const json& field(const json& doc, const char* name) {
  auto it = doc.find(name);
  if (it == doc.end() || it->is_null()) {
    throw ValidationError(std::string("bundle manifest missing field '") + name + "'");
  }
  return *it;
}

GridShape pair_field(const json& doc, const char* name) {
  const auto& v = field(doc, name);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number_unsigned() || !v[1].is_number_unsigned()) {
    throw ValidationError(std::string("field '") + name + "' must be [height, width]");
  }
  return {v[0].get<std::size_t>(), v[1].get<std::size_t>()};
}

}  // namespace

CamBundle load_bundle(const fs::path& manifest) {
  const auto text = read_text(manifest);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(manifest.string() + ": " + e.what());
  }
  if (!doc.is_object()) throw ValidationError(manifest.string() + ": manifest is not an object");

  try {
    const auto kind_text = field(doc, "kind").get<std::string>();
    LayerKind kind;
    if (kind_text == "conv") {
      kind = LayerKind::conv;
    } else if (kind_text == "vit_tokens") {
      kind = LayerKind::vit_tokens;
    } else {
      throw ValidationError("unknown bundle kind '" + kind_text + "'");
    }

    const fs::path base = manifest.parent_path();
    auto resolve = [&](const char* name) {
      fs::path p = field(doc, name).get<std::string>();
      return p.is_absolute() ? p : base / p;
    };

    CamBundle bundle{
        .kind = kind,
        .activations = read_tensor(resolve("activations")),
        .gradients = read_tensor(resolve("gradients")),
        .class_index = field(doc, "class_index").get<int>(),
        .image_path = field(doc, "image_path").get<std::string>(),
        .image_size = pair_field(doc, "image_size"),
        .patch_grid = std::nullopt,
        .model_name = field(doc, "model_name").get<std::string>(),
    };
    if (doc.contains("patch_grid") && !doc["patch_grid"].is_null()) {
      bundle.patch_grid = pair_field(doc, "patch_grid");
    }
    validate(bundle);
    return bundle;
  } catch (const json::exception& e) {
    throw ValidationError(manifest.string() + ": " + e.what());
  }
}

}  // namespace camkit
