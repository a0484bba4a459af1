#pragma once

#include <span>
#include <vector>

#include "wsunsal/kernel.hpp"
#include "wsunsal/weights.hpp"

namespace wsun {

struct SolverConfig {
  double lambda = 1e-3;    // L1 weight
  double mu = 0.1;         // augmented-Lagrangian parameter, > 0
  int max_iter = 200;
  double tol = 1e-4;       // residual threshold, scaled by sqrt(n)
  bool positivity = false; // project the shrinkage step onto x >= 0

  void validate() const;
};

struct UnmixResult {
  std::vector<double> x;
  int iterations_used = 0;
  bool converged = false;
  double final_primal_residual = 0.0;
  double final_dual_residual = 0.0;
};

// Elementwise sign(v_i) * max(|v_i| - t, 0).
std::vector<double> soft_threshold(std::span<const double> v, double t);
// Same followed by projection onto the positive orthant.
std::vector<double> soft_threshold_nonneg(std::span<const double> v, double t);

// ADMM solve of
//   min_x 1/2*(x^T G x - 2 x^T g + k_yy) + lambda*||Gamma x||_1
// with the splitting u = Gamma x. G is a kernel Gram, g the kernel cross
// vector and k_yy = k(y,y); under the linear kernel this is exactly
//   min_x 1/2*||A x - y||^2 + lambda*||Gamma x||_1.
//
// Per pixel the Hessian G + mu*Gamma^T*Gamma is Cholesky-factored once
// (retried once with ridge 1e-8*trace/dim when not positive definite), then
// each iteration runs
//   x <- H^{-1} (g + mu*Gamma^T(u + d))
//   u <- soft(Gamma x - d, lambda/mu)      (nonneg variant if positivity)
//   d <- d - (Gamma x - u)
// starting from u = d = 0, until both
//   ||Gamma x - u||_2          <= tol*sqrt(n)*rms(gamma)      (u units)
//   mu*||Gamma^T (u-u_prev)||_2 <= tol*sqrt(n)*||g||_inf       (gradient units)
// or max_iter. The scale factors make tol a relative threshold: the accuracy
// of the returned x is invariant under (Gamma, lambda) -> (c*Gamma, lambda/c)
// and under the raw magnitude of the spectra. Both reduce to tol*sqrt(n) for
// identity weights on O(1) data.
UnmixResult admm_weighted_sunsal(const GramBundle& gram, std::span<const double> cross,
                                 double k_yy, const GammaWeights& gamma,
                                 const SolverConfig& cfg);

// Reconstruction residual of one class: with x_c the restriction of x to
// [range.first, range.second), returns max(0, x_c^T G x_c - 2 x_c^T g + k_yy),
// which equals the squared reconstruction error in the kernel feature space.
double class_residual(const GramBundle& gram, std::span<const double> cross, double k_yy,
                      std::span<const double> x, std::pair<int, int> range);

}  // namespace wsun
