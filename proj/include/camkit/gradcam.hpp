#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Core>

#include "camkit/error.hpp"
#include "camkit/tensor.hpp"

namespace camkit {

template <typename Scalar>
using Array2 = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Class activation map, rows = height. Nonnegative on output of cam_cnn /
// cam_vit; in [0,1] after normalize_cam.
using Cam = Array2<double>;

// One importance weight per channel (alpha_k).
using ChannelWeights = Eigen::VectorXd;

// Spatial mean of (C,H,W) gradients per channel, accumulated in double.
ChannelWeights conv_channel_weights(const Tensor& gradients);

// Token mean of (N,C) gradients per channel, accumulated in double.
ChannelWeights token_channel_weights(const Tensor& gradients);

// ReLU(sum_k alpha_k A_k) over the H x W grid of a conv bundle.
Cam cam_cnn(const CamBundle& bundle);

// ReLU(sum_k alpha_k A[i,k]) per patch token, laid out row-major on `grid`
// (token 0 top-left, advancing along the width).
Cam cam_vit(const CamBundle& bundle, GridShape grid);

// Uses the bundle's patch_grid, or a square grid when N is a perfect square.
Cam cam_vit(const CamBundle& bundle);

// Dispatches on bundle.kind.
Cam compute_cam(const CamBundle& bundle);

Cam tokens_to_grid(const Eigen::Ref<const Eigen::VectorXd>& tokens, GridShape grid);
Eigen::VectorXd grid_to_tokens(const Cam& cam);

// Min-max scaling to [0,1]. A constant map becomes all zeros.
template <typename Derived>
Array2<typename Derived::Scalar> normalize_cam(const Eigen::ArrayBase<Derived>& cam) {
  using Scalar = typename Derived::Scalar;
  Array2<Scalar> out(cam.rows(), cam.cols());
  if (cam.size() == 0) return out;
  const Scalar lo = cam.minCoeff();
  const Scalar hi = cam.maxCoeff();
  if (!(hi > lo)) {
    out.setZero();
    return out;
  }
  out = (cam - lo) / (hi - lo);
  return out;
}

namespace detail {

struct Tap {
  Eigen::Index lo;
  Eigen::Index hi;
  double frac;
};

// Half-pixel-centre source coordinate for destination index d, clamped to
// the source extent.
inline Tap bilinear_tap(Eigen::Index d, Eigen::Index src, Eigen::Index dst) {
  double s = (static_cast<double>(d) + 0.5) * (static_cast<double>(src) / static_cast<double>(dst)) - 0.5;
  s = std::clamp(s, 0.0, static_cast<double>(src - 1));
  const auto lo = static_cast<Eigen::Index>(std::floor(s));
  const auto hi = std::min(lo + 1, src - 1);
  return {lo, hi, s - static_cast<double>(lo)};
}

}  // namespace detail

// Bilinear resampling with half-pixel centres and edge clamping. Output is
// clamped to >= 0.
template <typename Derived>
Array2<typename Derived::Scalar> upsample_bilinear(const Eigen::ArrayBase<Derived>& cam,
                                                   Eigen::Index target_rows,
                                                   Eigen::Index target_cols) {
  using Scalar = typename Derived::Scalar;
  if (target_rows < 1 || target_cols < 1) {
    throw ValidationError("upsample target size must be >= 1 in both axes");
  }
  if (cam.rows() < 1 || cam.cols() < 1) throw ValidationError("cannot upsample an empty map");

  std::vector<detail::Tap> col_taps(static_cast<std::size_t>(target_cols));
  for (Eigen::Index c = 0; c < target_cols; ++c) {
    col_taps[static_cast<std::size_t>(c)] = detail::bilinear_tap(c, cam.cols(), target_cols);
  }

  Array2<Scalar> out(target_rows, target_cols);
  for (Eigen::Index r = 0; r < target_rows; ++r) {
    const auto rt = detail::bilinear_tap(r, cam.rows(), target_rows);
    for (Eigen::Index c = 0; c < target_cols; ++c) {
      const auto& ct = col_taps[static_cast<std::size_t>(c)];
      // std::lerp is exact at the endpoints and for equal operands, so
      // constant maps and same-size resampling reproduce their input.
      const double top = std::lerp(static_cast<double>(cam(rt.lo, ct.lo)),
                                   static_cast<double>(cam(rt.lo, ct.hi)), ct.frac);
      const double bottom = std::lerp(static_cast<double>(cam(rt.hi, ct.lo)),
                                      static_cast<double>(cam(rt.hi, ct.hi)), ct.frac);
      const double v = std::lerp(top, bottom, rt.frac);
      out(r, c) = static_cast<Scalar>(std::max(v, 0.0));
    }
  }
  return out;
}

}  // namespace camkit
