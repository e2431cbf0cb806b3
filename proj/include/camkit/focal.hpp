#pragma once

namespace camkit {

// Binary focal loss parameters. alpha weights the positive class, gamma
// down-weights well-classified examples; gamma = 0 gives alpha-weighted
// binary cross-entropy.
struct FocalParams {
  double alpha = 0.25;
  double gamma = 2.0;
};

void validate(const FocalParams& params);

// L = -alpha y (1-p)^gamma ln p - (1-alpha)(1-y) p^gamma ln(1-p)
// Requires 0 < p < 1 and y in {0,1}; use the logit form near saturation.
double focal_loss(int y, double p, const FocalParams& params);

// Same loss with p = sigmoid(z), evaluated through softplus so that large
// |z| stays finite and accurate.
double focal_loss_logit(int y, double z, const FocalParams& params);

// dL/dz of focal_loss_logit.
double focal_grad_logit(int y, double z, const FocalParams& params);

double sigmoid(double z) noexcept;

// ln(1 + e^x) without overflow.
double softplus(double x) noexcept;

}  // namespace camkit
