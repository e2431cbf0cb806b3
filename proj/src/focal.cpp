#include "camkit/focal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "camkit/error.hpp"

namespace camkit {

namespace {

void check_label(int y) {
  if (y != 0 && y != 1) throw ValidationError("focal loss label must be 0 or 1, got " + std::to_string(y));
}

void check_logit(double z) {
  if (!std::isfinite(z)) throw ValidationError("focal loss logit must be finite");
}

}  // namespace

void validate(const FocalParams& params) {
  if (!(params.alpha >= 0.0 && params.alpha <= 1.0)) {
    throw ValidationError("focal alpha must lie in [0,1]");
  }
  if (!(params.gamma >= 0.0) || !std::isfinite(params.gamma)) {
    throw ValidationError("focal gamma must be finite and >= 0");
  }
}

double sigmoid(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus(double x) noexcept { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double focal_loss(int y, double p, const FocalParams& params) {
  check_label(y);
  validate(params);
  if (!(p > 0.0 && p < 1.0)) {
    throw ValidationError("focal loss probability must lie in (0,1); use the logit form");
  }
  const double a = params.alpha;
  const double g = params.gamma;
  if (y == 1) return -a * std::pow(1.0 - p, g) * std::log(p);
  return -(1.0 - a) * std::pow(p, g) * std::log1p(-p);
}

// With sp = softplus: ln p = -sp(-z) and ln(1-p) = -sp(z). 1-p is taken as
// sigmoid(-z) rather than by subtraction.
double focal_loss_logit(int y, double z, const FocalParams& params) {
  check_label(y);
  check_logit(z);
  validate(params);
  const double g = params.gamma;
  if (y == 1) return params.alpha * std::pow(sigmoid(-z), g) * softplus(-z);
  return (1.0 - params.alpha) * std::pow(sigmoid(z), g) * softplus(z);
}

// y=1: dL/dz = -alpha (1-p)^gamma [gamma p sp(-z) + (1-p)]
// y=0: dL/dz = (1-alpha) p^gamma [gamma (1-p) sp(z) + p]
double focal_grad_logit(int y, double z, const FocalParams& params) {
  check_label(y);
  check_logit(z);
  validate(params);
  const double g = params.gamma;
  const double p = sigmoid(z);
  const double q = sigmoid(-z);
  if (y == 1) {
    const double focus = std::pow(q, g);
    return -params.alpha * focus * (g * p * softplus(-z) + q);
  }
  const double focus = std::pow(p, g);
  return (1.0 - params.alpha) * focus * (g * q * softplus(z) + p);
}

}  // namespace camkit
