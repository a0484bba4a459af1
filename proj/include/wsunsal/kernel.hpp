#pragma once

#include <span>
#include <vector>

#include "wsunsal/data.hpp"
#include "wsunsal/numerics.hpp"

namespace wsun {

enum class KernelKind { linear, rbf };

// rbf uses exp(-||x-y||^2 / (2*sigma^2)); sigma is in the same units as the
// spectra. The alternative exp(-||x-y||^2 / sigma^2) convention is reachable
// by passing sigma/sqrt(2).
struct KernelSpec {
  KernelKind kind = KernelKind::linear;
  double sigma = 0.0;

  void validate() const;
};

// Kernel Gram of the dictionary columns plus the diagonal k(a_i, a_i).
// Computed once per dictionary; the per-pixel work only needs cross_vector.
struct GramBundle {
  Matrix gram;
  std::vector<double> self_k;

  int dim() const { return gram.rows(); }
};

double kernel_eval(const KernelSpec& spec, std::span<const double> x, std::span<const double> y);

GramBundle gram_matrix(const KernelSpec& spec, const Dictionary& dict);

// g[i] = k(a_i, y)
std::vector<double> cross_vector(const KernelSpec& spec, const Dictionary& dict,
                                 std::span<const double> y);

// k(x,y) / sqrt(k(x,x)*k(y,y)), clamped to [-1, 1]. Throws ZeroNorm when a
// self-kernel vanishes (linear kernel with a zero vector).
double kernel_cosine(const KernelSpec& spec, std::span<const double> x, std::span<const double> y);

}  // namespace wsun
