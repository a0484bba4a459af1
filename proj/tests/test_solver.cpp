#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "wsunsal/rng.hpp"
#include "wsunsal/solver.hpp"

using namespace wsun;

namespace {

GramBundle identity_gram(int n) {
  GramBundle bundle;
  bundle.gram = Matrix(n, n);
  for (int i = 0; i < n; ++i) bundle.gram(i, i) = 1.0;
  bundle.self_k.assign(static_cast<size_t>(n), 1.0);
  return bundle;
}

Dictionary dictionary_from_instance(const oracle::Instance& inst, int classes = 1) {
  Dictionary dict;
  dict.band_count = inst.rows;
  dict.column_count = inst.cols;
  dict.class_count = classes;
  dict.columns = inst.a;
  dict.column_class.resize(static_cast<size_t>(inst.cols));
  const int per = inst.cols / classes;
  for (int c = 0; c < classes; ++c) {
    const int begin = c * per;
    const int end = c + 1 == classes ? inst.cols : begin + per;
    dict.class_ranges.push_back({begin, end});
    for (int j = begin; j < end; ++j) dict.column_class[static_cast<size_t>(j)] = c + 1;
  }
  return dict;
}

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("soft threshold examples") {
  CHECK(soft_threshold(std::vector<double>{3, -0.5, 0}, 1.0) == std::vector<double>{2, 0, 0});
  const std::vector<double> v{0.3, -1.7, 4.2};
  CHECK(soft_threshold(v, 0.0) == v);
  CHECK(soft_threshold(std::vector<double>{1, -1}, 5.0) == std::vector<double>{0, 0});
  CHECK_THROWS_AS(soft_threshold(v, -0.1), Error);
}

TEST_CASE("nonnegative soft threshold") {
  CHECK(soft_threshold_nonneg(std::vector<double>{3, -3}, 1.0) == std::vector<double>{2, 0});
  CHECK(soft_threshold_nonneg(std::vector<double>{-1, -2}, 0.5) == std::vector<double>{0, 0});
  const std::vector<double> v{0.5, 2.0, 7.0};
  CHECK(soft_threshold_nonneg(v, 0.25) == soft_threshold(v, 0.25));
  CHECK_THROWS_AS(soft_threshold_nonneg(v, -1.0), Error);
}

TEST_CASE("soft threshold is nonexpansive") {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng.next_below(12));
    std::vector<double> a(static_cast<size_t>(n)), b(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      a[static_cast<size_t>(i)] = 3.0 * rng.next_normal();
      b[static_cast<size_t>(i)] = 3.0 * rng.next_normal();
    }
    const double t = rng.next_double();
    const auto sa = soft_threshold(a, t);
    const auto sb = soft_threshold(b, t);
    std::vector<double> ds(static_cast<size_t>(n)), dv(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      ds[static_cast<size_t>(i)] = sa[static_cast<size_t>(i)] - sb[static_cast<size_t>(i)];
      dv[static_cast<size_t>(i)] = a[static_cast<size_t>(i)] - b[static_cast<size_t>(i)];
    }
    CHECK(norm2(ds) <= norm2(dv) + 1e-15);
  }
}

TEST_CASE("unregularized orthonormal fit recovers the pixel") {
  const GramBundle gram = identity_gram(2);
  SolverConfig cfg;
  cfg.lambda = 0.0;
  cfg.tol = 1e-10;
  cfg.max_iter = 1000;
  const auto result = admm_weighted_sunsal(gram, std::vector<double>{1, 2}, 5.0,
                                           identity_weights(2), cfg);
  CHECK(result.converged);
  CHECK(result.x[0] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(result.x[1] == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("orthonormal lasso closed form soft(g, lambda)") {
  const GramBundle gram = identity_gram(2);
  SolverConfig cfg;
  cfg.lambda = 0.5;
  cfg.mu = 0.7;
  cfg.tol = 1e-12;
  cfg.max_iter = 5000;
  const auto result = admm_weighted_sunsal(gram, std::vector<double>{1, 2}, 5.0,
                                           identity_weights(2), cfg);
  CHECK(result.converged);
  CHECK(result.x[0] == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(result.x[1] == doctest::Approx(1.5).epsilon(1e-8));
}

TEST_CASE("weighted orthonormal case is separable: x_i = soft(g_i, lambda*gamma_i)") {
  const GramBundle gram = identity_gram(2);
  GammaWeights gamma;
  gamma.gamma = {1.0, 10.0};
  SolverConfig cfg;
  cfg.lambda = 0.5;
  cfg.tol = 1e-12;
  cfg.max_iter = 5000;
  const auto result = admm_weighted_sunsal(gram, std::vector<double>{1, 1}, 2.0, gamma, cfg);
  CHECK(result.converged);
  CHECK(result.x[0] == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(result.x[1] == doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("positivity projects the orthonormal solution onto x >= 0") {
  const GramBundle gram = identity_gram(3);
  SolverConfig cfg;
  cfg.lambda = 0.5;
  cfg.positivity = true;
  cfg.tol = 1e-12;
  cfg.max_iter = 5000;
  const auto result = admm_weighted_sunsal(gram, std::vector<double>{2, -3, 0.2}, 14.0,
                                           identity_weights(3), cfg);
  CHECK(result.x[0] == doctest::Approx(1.5).epsilon(1e-8));
  CHECK(result.x[1] == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(result.x[2] == doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("converged flag implies the residual thresholds") {
  Rng rng(17);
  const oracle::Instance inst = oracle::random_instance(rng, 8, 12, false);
  const Dictionary dict = dictionary_from_instance(inst);
  const GramBundle gram = gram_matrix(KernelSpec{}, dict);
  const auto g = cross_vector(KernelSpec{}, dict, inst.y);
  const double k_yy = kernel_eval(KernelSpec{}, inst.y, inst.y);
  GammaWeights gamma;
  gamma.gamma = inst.gamma;

  SolverConfig cfg;
  cfg.lambda = inst.lambda;
  cfg.tol = 1e-8;
  cfg.max_iter = 100000;
  const auto result = admm_weighted_sunsal(gram, g, k_yy, gamma, cfg);
  REQUIRE(result.converged);
  double gamma_scale = 0.0;
  for (double v : gamma.gamma) gamma_scale += v * v;
  gamma_scale = std::sqrt(gamma_scale / 12.0);
  double data_scale = 0.0;
  for (double v : g) data_scale = std::max(data_scale, std::abs(v));
  CHECK(result.final_primal_residual <= cfg.tol * std::sqrt(12.0) * gamma_scale);
  CHECK(result.final_dual_residual <= cfg.tol * std::sqrt(12.0) * data_scale);
  CHECK(result.iterations_used <= cfg.max_iter);

  // converged objective can never beat sitting at x = 0
  const double objective = oracle::objective(inst, result.x);
  CHECK(objective <= 0.5 * k_yy + 1e-9);
}

TEST_CASE("identity weights reduce to the independently coded standard SUnSAL") {
  Rng rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const oracle::Instance inst = oracle::random_instance(rng, 8, 14, true);
    const Dictionary dict = dictionary_from_instance(inst);
    const GramBundle gram = gram_matrix(KernelSpec{}, dict);
    const auto g = cross_vector(KernelSpec{}, dict, inst.y);
    const double k_yy = kernel_eval(KernelSpec{}, inst.y, inst.y);

    SolverConfig cfg;
    cfg.lambda = inst.lambda;
    cfg.mu = 0.5;
    cfg.tol = 1e-11;
    cfg.max_iter = 200000;
    const auto weighted = admm_weighted_sunsal(gram, g, k_yy, identity_weights(14), cfg);
    const auto standard = oracle::standard_sunsal(inst.a, 8, 14, inst.y, inst.lambda, cfg.mu,
                                                  cfg.tol, cfg.max_iter);
    for (int i = 0; i < 14; ++i) {
      CHECK(std::abs(weighted.x[static_cast<size_t>(i)] - standard[static_cast<size_t>(i)]) <=
            1e-8);
    }
  }
}

TEST_CASE("joint (Gamma, lambda) rescaling leaves the solution fixed") {
  Rng rng(29);
  const oracle::Instance inst = oracle::random_instance(rng, 12, 6, false);
  const Dictionary dict = dictionary_from_instance(inst);
  const GramBundle gram = gram_matrix(KernelSpec{}, dict);
  const auto g = cross_vector(KernelSpec{}, dict, inst.y);
  const double k_yy = kernel_eval(KernelSpec{}, inst.y, inst.y);

  SolverConfig cfg;
  cfg.lambda = inst.lambda;
  cfg.tol = 1e-9;
  cfg.max_iter = 200000;
  GammaWeights gamma;
  gamma.gamma = inst.gamma;
  const auto base = admm_weighted_sunsal(gram, g, k_yy, gamma, cfg);
  REQUIRE(base.converged);

  const double c = 10.0;
  GammaWeights scaled;
  scaled.gamma = inst.gamma;
  for (auto& v : scaled.gamma) v *= c;
  SolverConfig scaled_cfg = cfg;
  scaled_cfg.lambda = inst.lambda / c;
  const auto rescaled = admm_weighted_sunsal(gram, g, k_yy, scaled, scaled_cfg);
  REQUIRE(rescaled.converged);
  for (int i = 0; i < 6; ++i) {
    CHECK(std::abs(base.x[static_cast<size_t>(i)] - rescaled.x[static_cast<size_t>(i)]) <=
          10.0 * cfg.tol);
  }
}

TEST_CASE("degenerate Hessian propagates NotPositiveDefinite after the ridge retry") {
  GramBundle gram;
  gram.gram = Matrix(2, 2);          // all-zero Gram
  gram.self_k = {0.0, 0.0};
  GammaWeights zero_gamma;
  zero_gamma.gamma = {0.0, 0.0};     // hand-built below the documented floor
  SolverConfig cfg;
  CHECK_THROWS_AS(admm_weighted_sunsal(gram, std::vector<double>{1, 1}, 1.0, zero_gamma, cfg),
                  Error);
}

TEST_CASE("non-finite inputs abort with NonFiniteIterate") {
  const GramBundle gram = identity_gram(2);
  SolverConfig cfg;
  const std::vector<double> bad{std::nan(""), 1.0};
  try {
    admm_weighted_sunsal(gram, bad, 1.0, identity_weights(2), cfg);
    FAIL("expected NonFiniteIterate");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::non_finite_iterate);
  }
}

TEST_CASE("class residual") {
  Rng rng(37);
  const oracle::Instance inst = oracle::random_instance(rng, 6, 9, true);
  const Dictionary dict = dictionary_from_instance(inst, 3);
  const GramBundle gram = gram_matrix(KernelSpec{}, dict);
  const auto g = cross_vector(KernelSpec{}, dict, inst.y);
  const double k_yy = kernel_eval(KernelSpec{}, inst.y, inst.y);

  SUBCASE("zero coefficients leave the full pixel energy") {
    const std::vector<double> x(9, 0.0);
    for (int c = 0; c < 3; ++c) {
      CHECK(class_residual(gram, g, k_yy, x, dict.class_ranges[static_cast<size_t>(c)]) ==
            doctest::Approx(k_yy));
    }
  }

  SUBCASE("matches the direct ||A_c x_c - y||^2 evaluation") {
    std::vector<double> x(9);
    for (auto& v : x) v = rng.next_normal();
    for (int c = 0; c < 3; ++c) {
      const auto [begin, end] = dict.class_ranges[static_cast<size_t>(c)];
      std::vector<double> reconstruction(6, 0.0);
      for (int j = begin; j < end; ++j) {
        for (int r = 0; r < 6; ++r) {
          reconstruction[static_cast<size_t>(r)] +=
              inst.a[static_cast<size_t>(j) * 6 + r] * x[static_cast<size_t>(j)];
        }
      }
      double direct = 0.0;
      for (int r = 0; r < 6; ++r) {
        const double d = reconstruction[static_cast<size_t>(r)] - inst.y[static_cast<size_t>(r)];
        direct += d * d;
      }
      CHECK(class_residual(gram, g, k_yy, x, dict.class_ranges[static_cast<size_t>(c)]) ==
            doctest::Approx(direct).epsilon(1e-9));
    }
  }

  SUBCASE("exact reconstruction by one class gives residual ~ 0") {
    // pixel built from the columns of class 2
    const auto [begin, end] = dict.class_ranges[1];
    std::vector<double> coeff(9, 0.0);
    coeff[static_cast<size_t>(begin)] = 0.7;
    coeff[static_cast<size_t>(begin + 1)] = -0.4;
    std::vector<double> pixel(6, 0.0);
    for (int j = begin; j < end; ++j) {
      for (int r = 0; r < 6; ++r) {
        pixel[static_cast<size_t>(r)] +=
            inst.a[static_cast<size_t>(j) * 6 + r] * coeff[static_cast<size_t>(j)];
      }
    }
    const auto g2 = cross_vector(KernelSpec{}, dict, pixel);
    const double k2 = kernel_eval(KernelSpec{}, pixel, pixel);
    CHECK(class_residual(gram, g2, k2, coeff, dict.class_ranges[1]) <= 1e-8);
  }

  SUBCASE("empty range is rejected") {
    const std::vector<double> x(9, 0.0);
    CHECK_THROWS_AS(class_residual(gram, g, k_yy, x, {3, 3}), Error);
    CHECK_THROWS_AS(class_residual(gram, g, k_yy, x, {7, 12}), Error);
  }
}
