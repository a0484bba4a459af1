#include "wsunsal/weights.hpp"

#include <cmath>

namespace wsun {

GammaWeights identity_weights(int n) {
  if (n < 1) throw Error(ErrorCode::invalid_argument, "identity_weights: n must be >= 1");
  GammaWeights w;
  w.gamma.assign(static_cast<size_t>(n), 1.0);
  return w;
}

GammaWeights weights_from_raw(std::vector<double> raw, bool* degenerate) {
  if (raw.empty()) throw Error(ErrorCode::invalid_argument, "weights_from_raw: empty input");
  double mean = 0.0;
  for (double v : raw) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::non_finite_value, "weights_from_raw: non-finite distance");
    }
    mean += v;
  }
  mean /= static_cast<double>(raw.size());
  GammaWeights w;
  w.gamma = std::move(raw);
  if (mean <= 0.0) {
    if (degenerate) *degenerate = true;
    for (double& v : w.gamma) v = kGammaFloor;
    return w;
  }
  if (degenerate) *degenerate = false;
  for (double& v : w.gamma) v = std::max(kGammaFloor, v / mean);
  return w;
}

GammaWeights euclidean_weights(const Dictionary& dict, std::span<const double> y,
                               bool* degenerate) {
  if (static_cast<int>(y.size()) != dict.band_count) {
    throw Error(ErrorCode::dimension_mismatch, "euclidean_weights: pixel length != bands");
  }
  std::vector<double> raw(static_cast<size_t>(dict.column_count));
  for (int i = 0; i < dict.column_count; ++i) {
    const auto a = dict.column(i);
    double s = 0.0;
    for (size_t b = 0; b < a.size(); ++b) {
      const double d = y[b] - a[b];
      s += d * d;
    }
    raw[static_cast<size_t>(i)] = std::sqrt(s);
  }
  return weights_from_raw(std::move(raw), degenerate);
}

GammaWeights kernel_angle_weights(const KernelSpec& spec, const Dictionary& dict,
                                  std::span<const double> y, bool* degenerate) {
  if (static_cast<int>(y.size()) != dict.band_count) {
    throw Error(ErrorCode::dimension_mismatch, "kernel_angle_weights: pixel length != bands");
  }
  std::vector<double> raw(static_cast<size_t>(dict.column_count));
  for (int i = 0; i < dict.column_count; ++i) {
    raw[static_cast<size_t>(i)] = 1.0 - kernel_cosine(spec, y, dict.column(i));
  }
  return weights_from_raw(std::move(raw), degenerate);
}

}  // namespace wsun
