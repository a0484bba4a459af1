#pragma once

#include <span>
#include <vector>

#include "wsunsal/data.hpp"
#include "wsunsal/kernel.hpp"

namespace wsun {

// Floor applied to every weight so mu*Gamma^T*Gamma never zeroes a Hessian
// diagonal entry when the Gram is rank-deficient.
inline constexpr double kGammaFloor = 1e-6;

// Diagonal of the per-pixel weighting matrix applied inside the L1 penalty.
// A large entry penalizes a dictionary column that is far from the pixel.
struct GammaWeights {
  std::vector<double> gamma;

  int size() const { return static_cast<int>(gamma.size()); }
};

GammaWeights identity_weights(int n);

// raw_i = ||y - a_i||_2, then gamma_i = max(floor, raw_i / mean(raw)).
// Mean normalization keeps lambda's scale independent of the pixel's absolute
// distance to the dictionary. When every distance is zero the weights degrade
// to the floor (a test pixel duplicating a training pixel is legitimate);
// `degenerate`, when non-null, reports that case.
GammaWeights euclidean_weights(const Dictionary& dict, std::span<const double> y,
                               bool* degenerate = nullptr);

// Same normalization with raw_i = 1 - kernel_cosine(spec, y, a_i).
GammaWeights kernel_angle_weights(const KernelSpec& spec, const Dictionary& dict,
                                  std::span<const double> y, bool* degenerate = nullptr);

// Shared normalization step, exposed for the raw-distance variants above.
GammaWeights weights_from_raw(std::vector<double> raw, bool* degenerate = nullptr);

}  // namespace wsun
