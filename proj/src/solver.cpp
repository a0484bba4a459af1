#include "wsunsal/solver.hpp"

#include <cmath>

namespace wsun {
namespace {

double soft_scalar(double v, double t) {
  const double m = std::abs(v) - t;
  return m > 0.0 ? (v < 0.0 ? -m : m) : 0.0;
}

bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(mu > 0.0)) throw Error(ErrorCode::invalid_config, "solver: mu must be > 0");
  if (!(tol > 0.0)) throw Error(ErrorCode::invalid_config, "solver: tol must be > 0");
  if (max_iter < 1) throw Error(ErrorCode::invalid_config, "solver: max_iter must be >= 1");
  if (lambda < 0.0) throw Error(ErrorCode::invalid_config, "solver: lambda must be >= 0");
}

std::vector<double> soft_threshold(std::span<const double> v, double t) {
  if (t < 0.0) throw Error(ErrorCode::negative_threshold, "soft_threshold: negative threshold");
  std::vector<double> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = soft_scalar(v[i], t);
  return out;
}

std::vector<double> soft_threshold_nonneg(std::span<const double> v, double t) {
  if (t < 0.0) throw Error(ErrorCode::negative_threshold, "soft_threshold: negative threshold");
  std::vector<double> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = std::max(0.0, soft_scalar(v[i], t));
  return out;
}

UnmixResult admm_weighted_sunsal(const GramBundle& gram, std::span<const double> cross,
                                 double k_yy, const GammaWeights& gamma,
                                 const SolverConfig& cfg) {
  cfg.validate();
  const int n = gram.dim();
  if (static_cast<int>(cross.size()) != n || gamma.size() != n) {
    throw Error(ErrorCode::dimension_mismatch, "admm_weighted_sunsal: size mismatch");
  }
  if (!(k_yy >= 0.0)) {
    throw Error(ErrorCode::invalid_argument, "admm_weighted_sunsal: k_yy must be >= 0");
  }

  // H = G + mu * Gamma^T Gamma; Gamma is diagonal so only the diagonal moves.
  Matrix h(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) h(i, j) = gram.gram(i, j);
    h(i, i) += cfg.mu * gamma.gamma[static_cast<size_t>(i)] * gamma.gamma[static_cast<size_t>(i)];
  }
  SpdMatrix spd(std::move(h));
  CholeskyFactor factor;
  try {
    factor = cholesky_factor(spd);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::not_positive_definite) throw;
    factor = cholesky_factor(spd, 1e-8 * spd.trace() / n);
  }

  // Relative stopping thresholds. The primal residual lives in u = Gamma*x
  // units, so it scales with rms(gamma); the dual residual lives in gradient
  // units, so it scales with the data (||g||_inf) but not with Gamma. This
  // keeps the delivered x accuracy invariant under the joint rescaling
  // (Gamma, lambda) -> (c*Gamma, lambda/c) and meaningful for raw-reflectance
  // magnitudes. Identity weights and O(1) data reduce both to tol*sqrt(n).
  const std::vector<double>& gv = gamma.gamma;
  double gamma_ms = 0.0;
  for (double v : gv) gamma_ms += v * v;
  const double gamma_scale = std::sqrt(gamma_ms / n);
  double data_scale = 0.0;
  for (double v : cross) data_scale = std::max(data_scale, std::abs(v));
  if (data_scale == 0.0) data_scale = 1.0;
  const double root_n = std::sqrt(static_cast<double>(n));
  const double primal_threshold = cfg.tol * root_n * gamma_scale;
  const double dual_threshold = cfg.tol * root_n * data_scale;
  const double shrink = cfg.lambda / cfg.mu;

  std::vector<double> x(static_cast<size_t>(n), 0.0);
  std::vector<double> u(static_cast<size_t>(n), 0.0);
  std::vector<double> d(static_cast<size_t>(n), 0.0);
  std::vector<double> f(static_cast<size_t>(n), 0.0);
  std::vector<double> gx(static_cast<size_t>(n), 0.0);

  UnmixResult result;
  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    for (int i = 0; i < n; ++i) {
      f[static_cast<size_t>(i)] =
          cross[static_cast<size_t>(i)] +
          cfg.mu * gv[static_cast<size_t>(i)] * (u[static_cast<size_t>(i)] + d[static_cast<size_t>(i)]);
    }
    cholesky_solve_into(factor, f, x);

    double primal2 = 0.0;
    double dual2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const size_t k = static_cast<size_t>(i);
      gx[k] = gv[k] * x[k];
      const double v = gx[k] - d[k];
      const double u_next = cfg.positivity ? std::max(0.0, soft_scalar(v, shrink))
                                           : soft_scalar(v, shrink);
      const double du = u_next - u[k];
      dual2 += (gv[k] * du) * (gv[k] * du);
      u[k] = u_next;
      d[k] -= gx[k] - u[k];
      const double pr = gx[k] - u[k];
      primal2 += pr * pr;
    }
    result.iterations_used = iter + 1;
    result.final_primal_residual = std::sqrt(primal2);
    result.final_dual_residual = cfg.mu * std::sqrt(dual2);

    if (!all_finite(x) || !std::isfinite(primal2) || !std::isfinite(dual2)) {
      throw Error(ErrorCode::non_finite_iterate,
                  "admm_weighted_sunsal: non-finite iterate at iteration " +
                      std::to_string(iter + 1));
    }
    if (result.final_primal_residual <= primal_threshold &&
        result.final_dual_residual <= dual_threshold) {
      result.converged = true;
      break;
    }
  }
  result.x = std::move(x);
  return result;
}

double class_residual(const GramBundle& gram, std::span<const double> cross, double k_yy,
                      std::span<const double> x, std::pair<int, int> range) {
  const int n = gram.dim();
  const auto [begin, end] = range;
  if (begin < 0 || end > n || begin >= end) {
    throw Error(ErrorCode::empty_class_range, "class_residual: empty or out-of-range class");
  }
  if (static_cast<int>(x.size()) != n || static_cast<int>(cross.size()) != n) {
    throw Error(ErrorCode::dimension_mismatch, "class_residual: size mismatch");
  }
  double quad = 0.0;
  double lin = 0.0;
  for (int i = begin; i < end; ++i) {
    const double xi = x[static_cast<size_t>(i)];
    if (xi == 0.0) continue;
    double row = 0.0;
    for (int j = begin; j < end; ++j) row += gram.gram(i, j) * x[static_cast<size_t>(j)];
    quad += xi * row;
    lin += xi * cross[static_cast<size_t>(i)];
  }
  return std::max(0.0, quad - 2.0 * lin + k_yy);
}

}  // namespace wsun
