#include "wsunsal/kernel.hpp"

#include <algorithm>
#include <cmath>

namespace wsun {
namespace {

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double squared_distance(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return s;
}

}  // namespace

void KernelSpec::validate() const {
  if (kind == KernelKind::rbf && !(sigma > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "rbf kernel requires sigma > 0");
  }
}

double kernel_eval(const KernelSpec& spec, std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::dimension_mismatch, "kernel_eval: vector lengths differ");
  }
  switch (spec.kind) {
    case KernelKind::linear:
      return dot(x, y);
    case KernelKind::rbf:
      return std::exp(-squared_distance(x, y) / (2.0 * spec.sigma * spec.sigma));
  }
  throw Error(ErrorCode::invalid_argument, "unknown kernel kind");
}

GramBundle gram_matrix(const KernelSpec& spec, const Dictionary& dict) {
  spec.validate();
  const int n = dict.column_count;
  GramBundle bundle;
  bundle.gram = Matrix(n, n);
  bundle.self_k.resize(static_cast<size_t>(n));
  // upper triangle computed, lower mirrored: symmetry is exact by construction
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double v = kernel_eval(spec, dict.column(i), dict.column(j));
      bundle.gram(i, j) = v;
      bundle.gram(j, i) = v;
    }
    bundle.self_k[static_cast<size_t>(i)] = bundle.gram(i, i);
  }
  return bundle;
}

std::vector<double> cross_vector(const KernelSpec& spec, const Dictionary& dict,
                                 std::span<const double> y) {
  spec.validate();
  if (static_cast<int>(y.size()) != dict.band_count) {
    throw Error(ErrorCode::dimension_mismatch, "cross_vector: pixel length != dictionary bands");
  }
  std::vector<double> g(static_cast<size_t>(dict.column_count));
  for (int i = 0; i < dict.column_count; ++i) {
    g[static_cast<size_t>(i)] = kernel_eval(spec, dict.column(i), y);
  }
  return g;
}

double kernel_cosine(const KernelSpec& spec, std::span<const double> x, std::span<const double> y) {
  const double kxx = kernel_eval(spec, x, x);
  const double kyy = kernel_eval(spec, y, y);
  if (!(kxx > 0.0) || !(kyy > 0.0)) {
    throw Error(ErrorCode::zero_norm, "kernel_cosine: zero self-kernel");
  }
  const double c = kernel_eval(spec, x, y) / std::sqrt(kxx * kyy);
  return std::clamp(c, -1.0, 1.0);
}

}  // namespace wsun
