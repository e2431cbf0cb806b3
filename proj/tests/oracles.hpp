#pragma once

// Reference implementations used only by tests. Each one follows the
// defining formula with plain loops and shares no code with src/.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <set>
#include <vector>

namespace camkit::oracle {

// CAM(i,j) = max(0, sum_k alpha_k A[k,i,j]), alpha_k = mean_ij grad[k,i,j].
inline std::vector<double> conv_cam(const std::vector<float>& a, const std::vector<float>& g, std::size_t c,
                                    std::size_t h, std::size_t w) {
  std::vector<double> alpha(c, 0.0);
  for (std::size_t k = 0; k < c; ++k) {
    for (std::size_t i = 0; i < h; ++i) {
      for (std::size_t j = 0; j < w; ++j) alpha[k] += g[(k * h + i) * w + j];
    }
    alpha[k] /= static_cast<double>(h * w);
  }
  std::vector<double> cam(h * w, 0.0);
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = 0; j < w; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < c; ++k) s += alpha[k] * a[(k * h + i) * w + j];
      cam[i * w + j] = s > 0.0 ? s : 0.0;
    }
  }
  return cam;
}

// CAM(i) = max(0, sum_k alpha_k A[i,k]), alpha_k = mean_i grad[i,k].
inline std::vector<double> token_cam(const std::vector<float>& a, const std::vector<float>& g, std::size_t n,
                                     std::size_t c) {
  std::vector<double> alpha(c, 0.0);
  for (std::size_t k = 0; k < c; ++k) {
    for (std::size_t i = 0; i < n; ++i) alpha[k] += g[i * c + k];
    alpha[k] /= static_cast<double>(n);
  }
  std::vector<double> cam(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < c; ++k) s += alpha[k] * a[i * c + k];
    cam[i] = s > 0.0 ? s : 0.0;
  }
  return cam;
}

// Scalar evaluation of the half-pixel bilinear formula at one output pixel.
inline double bilinear_at(const std::vector<double>& src, long sh, long sw, long th, long tw, long r, long c) {
  auto coord = [](long d, long s, long t) {
    double x = (d + 0.5) * (static_cast<double>(s) / static_cast<double>(t)) - 0.5;
    return std::min(std::max(x, 0.0), static_cast<double>(s - 1));
  };
  const double y = coord(r, sh, th);
  const double x = coord(c, sw, tw);
  const long y0 = static_cast<long>(std::floor(y));
  const long x0 = static_cast<long>(std::floor(x));
  const long y1 = std::min(y0 + 1, sh - 1);
  const long x1 = std::min(x0 + 1, sw - 1);
  const double fy = y - y0;
  const double fx = x - x0;
  const double v = (1 - fy) * (1 - fx) * src[y0 * sw + x0] + (1 - fy) * fx * src[y0 * sw + x1] +
                   fy * (1 - fx) * src[y1 * sw + x0] + fy * fx * src[y1 * sw + x1];
  return std::max(v, 0.0);
}

// O(n^2) pairwise ROC-AUC with half credit for ties.
inline double pairwise_auc(const std::vector<int>& labels, const std::vector<double>& scores) {
  double credit = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < labels.size(); ++j) {
      if (labels[j] != 0) continue;
      pairs += 1.0;
      if (scores[i] > scores[j]) credit += 1.0;
      else if (scores[i] == scores[j]) credit += 0.5;
    }
  }
  return credit / pairs;
}

struct SweepPoint {
  double threshold;
  std::size_t tp, fp, fn;
};

// Counts at every distinct score, highest threshold first, each tallied
// from scratch.
inline std::vector<SweepPoint> sweep(const std::vector<int>& labels, const std::vector<double>& scores) {
  std::set<double, std::greater<>> thresholds(scores.begin(), scores.end());
  std::vector<SweepPoint> out;
  for (double t : thresholds) {
    SweepPoint p{t, 0, 0, 0};
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const bool pred = scores[i] >= t;
      if (pred && labels[i] == 1) ++p.tp;
      if (pred && labels[i] == 0) ++p.fp;
      if (!pred && labels[i] == 1) ++p.fn;
    }
    out.push_back(p);
  }
  return out;
}

inline double exhaustive_ap(const std::vector<int>& labels, const std::vector<double>& scores) {
  double ap = 0.0;
  double prev = 0.0;
  for (const auto& p : sweep(labels, scores)) {
    const double recall = static_cast<double>(p.tp) / static_cast<double>(p.tp + p.fn);
    const double precision = static_cast<double>(p.tp) / static_cast<double>(p.tp + p.fp);
    ap += (recall - prev) * precision;
    prev = recall;
  }
  return ap;
}

struct F1Point {
  double f1;
  double threshold;
};

// Max F1 over every distinct score; smallest threshold among ties.
inline F1Point exhaustive_best_f1(const std::vector<int>& labels, const std::vector<double>& scores) {
  F1Point best{-1.0, 0.0};
  for (const auto& p : sweep(labels, scores)) {
    const double f1 = static_cast<double>(2 * p.tp) / static_cast<double>(2 * p.tp + p.fp + p.fn);
    if (f1 > best.f1 || (f1 == best.f1 && p.threshold < best.threshold)) best = {f1, p.threshold};
  }
  return best;
}

// Weighted binary cross-entropy, the gamma = 0 focal loss.
inline double weighted_bce(int y, double p, double alpha) {
  return y == 1 ? -alpha * std::log(p) : -(1.0 - alpha) * std::log(1.0 - p);
}

}  // namespace camkit::oracle
