#include "camkit/gradcam.hpp"

#include <cmath>

namespace camkit {

namespace {

Eigen::Index idx(std::size_t n) { return static_cast<Eigen::Index>(n); }

void require_kind(const CamBundle& b, LayerKind kind) {
  if (b.kind != kind) {
    throw ValidationError(std::string("expected a ") + to_string(kind) + " bundle, got " +
                          to_string(b.kind));
  }
}

}  // namespace

ChannelWeights conv_channel_weights(const Tensor& gradients) {
  if (gradients.rank() != 3) throw ValidationError("conv gradients must be rank 3 (C,H,W)");
  const auto channels = idx(gradients.extent(0));
  const auto positions = idx(gradients.extent(1) * gradients.extent(2));
  return gradients.matrix(channels, positions).cast<double>().rowwise().mean();
}

ChannelWeights token_channel_weights(const Tensor& gradients) {
  if (gradients.rank() != 2) throw ValidationError("token gradients must be rank 2 (N,C)");
  const auto tokens = idx(gradients.extent(0));
  const auto channels = idx(gradients.extent(1));
  return gradients.matrix(tokens, channels).cast<double>().colwise().mean().transpose();
}

Cam cam_cnn(const CamBundle& bundle) {
  require_kind(bundle, LayerKind::conv);
  validate(bundle);
  const auto& a = bundle.activations;
  const auto channels = idx(a.extent(0));
  const auto height = idx(a.extent(1));
  const auto width = idx(a.extent(2));

  const ChannelWeights alpha = conv_channel_weights(bundle.gradients);
  const Eigen::RowVectorXd weighted =
      alpha.transpose() * a.matrix(channels, height * width).cast<double>();
  Cam cam = Eigen::Map<const Cam>(weighted.data(), height, width);
  return cam.max(0.0);
}

Cam tokens_to_grid(const Eigen::Ref<const Eigen::VectorXd>& tokens, GridShape grid) {
  if (grid.height == 0 || grid.width == 0 || idx(grid.cells()) != tokens.size()) {
    throw ValidationError("grid " + std::to_string(grid.height) + "x" + std::to_string(grid.width) +
                          " does not hold " + std::to_string(tokens.size()) + " tokens");
  }
  return Eigen::Map<const Cam>(tokens.data(), idx(grid.height), idx(grid.width));
}

Eigen::VectorXd grid_to_tokens(const Cam& cam) {
  return Eigen::Map<const Eigen::VectorXd>(cam.data(), cam.size());
}

Cam cam_vit(const CamBundle& bundle, GridShape grid) {
  require_kind(bundle, LayerKind::vit_tokens);
  validate(bundle);
  const auto& a = bundle.activations;
  const auto tokens = idx(a.extent(0));
  const auto channels = idx(a.extent(1));
  if (idx(grid.cells()) != tokens) {
    throw ValidationError("grid " + std::to_string(grid.height) + "x" + std::to_string(grid.width) +
                          " does not match N=" + std::to_string(tokens));
  }

  const ChannelWeights alpha = token_channel_weights(bundle.gradients);
  const Eigen::VectorXd per_token =
      (a.matrix(tokens, channels).cast<double>() * alpha).cwiseMax(0.0);
  return tokens_to_grid(per_token, grid);
}

Cam cam_vit(const CamBundle& bundle) {
  if (bundle.patch_grid) return cam_vit(bundle, *bundle.patch_grid);
  require_kind(bundle, LayerKind::vit_tokens);
  if (bundle.activations.rank() != 2) throw ValidationError("vit_tokens bundle must be rank 2");
  const auto n = bundle.activations.extent(0);
  const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
  if (side * side != n) {
    throw ValidationError("no patch_grid given and N=" + std::to_string(n) +
                          " is not a perfect square");
  }
  return cam_vit(bundle, GridShape{side, side});
}

Cam compute_cam(const CamBundle& bundle) {
  return bundle.kind == LayerKind::conv ? cam_cnn(bundle) : cam_vit(bundle);
}

}  // namespace camkit
