#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hdtir/debias.hpp"
#include "hdtir/likelihood.hpp"
#include "support/helpers.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace hdtir;
using testsupport::make_tail;
using testsupport::random_tail;

TEST_CASE("make_folds balances sizes and is reproducible") {
  const FoldPlan even = make_folds(10, 5, 7);
  auto sizes = [](const FoldPlan& plan) {
    std::vector<int> s(static_cast<std::size_t>(plan.K), 0);
    for (int a : plan.assignments) ++s[static_cast<std::size_t>(a)];
    std::sort(s.begin(), s.end());
    return s;
  };
  CHECK(sizes(even) == std::vector<int>{2, 2, 2, 2, 2});

  const FoldPlan odd = make_folds(11, 5, 7);
  CHECK(sizes(odd) == std::vector<int>{2, 2, 2, 2, 3});

  const FoldPlan again = make_folds(11, 5, 7);
  CHECK(odd.assignments == again.assignments);
  const FoldPlan other = make_folds(11, 5, 8);
  CHECK(odd.assignments != other.assignments);

  CHECK_THROWS_AS(make_folds(10, 1, 0), ConfigError);
  CHECK_THROWS_AS(make_folds(10, 11, 0), ConfigError);

  const auto folds = odd.fold_indices();
  const auto comps = odd.complement_indices();
  for (std::size_t k = 0; k < folds.size(); ++k)
    CHECK(folds[k].size() + comps[k].size() == 11);
}

TEST_CASE("confidence_interval quantile arithmetic") {
  const auto [lo, hi] = confidence_interval(0.0, 1.0, 1.0, 0.95);
  CHECK(lo == doctest::Approx(-1.959964).epsilon(1e-6));
  CHECK(hi == doctest::Approx(1.959964).epsilon(1e-6));

  const auto [l2, h2] = confidence_interval(0.0, 4.0, 1.0, 0.5);
  CHECK(h2 == doctest::Approx(0.674490 * 2.0).epsilon(1e-6));

  // The empirical-table layout: estimate -0.14 with se 0.06.
  const auto [tl, th] = confidence_interval(-0.14, 0.06 * 0.06, 1.0, 0.95);
  CHECK(std::abs(tl - (-0.26)) <= 0.01);
  CHECK(std::abs(th - (-0.03)) <= 0.01);

  CHECK_THROWS_AS(confidence_interval(0.0, 0.0, 1.0, 0.95), ConfigError);
  CHECK_THROWS_AS(confidence_interval(0.0, 1.0, 1.0, 1.0), ConfigError);
}

TEST_CASE("correction vanishes when the fit half is also the correction half") {
  std::mt19937_64 rng(5);
  const TailSample tail = random_tail(rng, 160, 3, 1.0, 0.4);
  DebiasOptions options;
  options.lasso.lambda = 0.0;
  options.lasso.tol = 1e-12;
  options.projection.gamma1 = 0.25;
  options.projection.gamma2 = 50.0;
  options.seed = 11;
  options.correction_fold = CorrectionFold::estimation;

  const auto coefs = debias_sample_split(tail, {0, 1, 2}, options);
  for (const auto& c : coefs) {
    REQUIRE_FALSE(c.failed);
    // score(D2, theta_hat) = 0 at the unpenalized optimum, so theta_tilde
    // collapses onto theta_hat.
    CHECK(c.theta_tilde == doctest::Approx(c.theta_hat).epsilon(1e-8));
    CHECK(c.variance > 0.0);
    CHECK(c.se * c.se * c.n_inference == doctest::Approx(c.variance).epsilon(1e-12));
    CHECK(c.ci_low < c.ci_high);
    CHECK(c.z == doctest::Approx(c.theta_tilde / c.se));
  }
}

TEST_CASE("identical rows make cross-fitting equal to sample splitting") {
  Matrix row(1, 2);
  row << 1.0, 0.5;
  const Index n = 40;
  Matrix rows = row.replicate(n, 1);
  const TailSample tail = make_tail(rows, Vector::Constant(n, 0.7));

  DebiasOptions options;
  options.lasso.lambda = 0.01;
  options.projection.gamma1 = 0.4;
  options.projection.gamma2 = 10.0;
  options.projection.solver_tol = 1e-9;
  options.seed = 3;

  const auto split = debias_sample_split(tail, {0, 1}, options);
  const auto cross = debias_cross_fit(tail, 5, {0, 1}, options);
  for (std::size_t i = 0; i < 2; ++i) {
    REQUIRE_FALSE(split[i].failed);
    REQUIRE_FALSE(cross[i].failed);
    CHECK(cross[i].theta_tilde == doctest::Approx(split[i].theta_tilde).epsilon(1e-5));
  }
}

TEST_CASE("negating a covariate column negates theta_tilde and keeps |z|") {
  std::mt19937_64 rng(9);
  TailSample tail = random_tail(rng, 300, 6, 1.0, 0.4);
  TailSample flipped = tail;
  flipped.rows.col(2) *= -1.0;

  DebiasOptions options;
  options.seed = 21;
  for (bool crossfit : {false, true}) {
    const auto base = crossfit ? debias_cross_fit(tail, 4, {2}, options)
                               : debias_sample_split(tail, {2}, options);
    const auto flip = crossfit ? debias_cross_fit(flipped, 4, {2}, options)
                               : debias_sample_split(flipped, {2}, options);
    REQUIRE_FALSE(base[0].failed);
    REQUIRE_FALSE(flip[0].failed);
    CHECK(flip[0].theta_tilde == doctest::Approx(-base[0].theta_tilde).epsilon(1e-7));
    CHECK(std::abs(flip[0].z) == doctest::Approx(std::abs(base[0].z)).epsilon(1e-7));
  }
}

TEST_CASE("cross-fit output is invariant to fold relabeling") {
  std::mt19937_64 rng(13);
  const TailSample tail = random_tail(rng, 120, 4, 1.0, 0.3);
  DebiasOptions options;
  options.seed = 17;
  const CrossFitParts parts = cross_fit_parts(tail, 4, options);

  CrossFitParts permuted = parts;
  auto rotate_all = [](auto& v) { std::rotate(v.begin(), v.begin() + 1, v.end()); };
  rotate_all(permuted.fold_fits);
  rotate_all(permuted.projection_samples);
  rotate_all(permuted.correction_samples);
  rotate_all(permuted.projection_grams);
  rotate_all(permuted.correction_grams);
  rotate_all(permuted.correction_score_means);

  const auto s1 = make_projection_solvers(parts, options.projection);
  const auto s2 = make_projection_solvers(permuted, options.projection);
  const auto a = debias_coords_on_parts(parts, s1, {0, 3}, options);
  const auto b = debias_coords_on_parts(permuted, s2, {0, 3}, options);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(a[i].theta_tilde == doctest::Approx(b[i].theta_tilde).epsilon(1e-12));
    CHECK(a[i].variance == doctest::Approx(b[i].variance).epsilon(1e-12));
  }
}

TEST_CASE("projection failures are isolated per coordinate") {
  std::mt19937_64 rng(19);
  TailSample tail = random_tail(rng, 80, 6, 1.0, 0.3);
  tail.rows.col(4).setZero();  // e_4 is unreachable by the gram

  DebiasOptions options;
  options.lasso.lambda = 0.05;
  options.projection.gamma1 = 0.01;
  options.projection.gamma2 = 30.0;
  options.projection.max_iter = 1500;
  options.seed = 23;

  const auto coefs = debias_sample_split(tail, {0, 4}, options);
  CHECK_FALSE(coefs[0].failed);
  CHECK(coefs[1].failed);
  CHECK_FALSE(coefs[1].message.empty());

  const auto cross = debias_cross_fit(tail, 4, {0, 4}, options);
  CHECK_FALSE(cross[0].failed);
  CHECK(cross[1].failed);
}

TEST_CASE("CIs cover the truth at a sane rate for both methods") {
  const Index n = 400, p = 5;
  Vector theta0(p);
  theta0 << 0.15, -0.1, 0.0, 0.05, 0.0;
  for (bool crossfit : {false, true}) {
    int covered = 0, valid = 0;
    double z_sum = 0.0;
    for (int rep = 0; rep < 150; ++rep) {
      std::mt19937_64 rng(500 + rep);
      std::normal_distribution<double> normal(0.0, 1.0);
      std::uniform_real_distribution<double> uniform(0.0, 1.0);
      Matrix x(n, p);
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < p; ++j) x(i, j) = normal(rng);
      TailSample tail;
      tail.omega = 1.0;
      tail.rows = x;
      tail.log_exceedances.resize(n);
      for (Index i = 0; i < n; ++i)
        tail.log_exceedances[i] =
            -std::log(1.0 - uniform(rng)) / std::exp(x.row(i).dot(theta0));

      DebiasOptions options;
      options.seed = static_cast<std::uint64_t>(rep);
      const auto coefs = crossfit ? debias_cross_fit(tail, 5, {0}, options)
                                  : debias_sample_split(tail, {0}, options);
      if (coefs[0].failed) continue;
      ++valid;
      covered += (coefs[0].ci_low <= theta0[0] && theta0[0] <= coefs[0].ci_high) ? 1 : 0;
      z_sum += (coefs[0].theta_tilde - theta0[0]) / coefs[0].se;
    }
    REQUIRE(valid >= 145);
    const double rate = static_cast<double>(covered) / static_cast<double>(valid);
    CHECK(rate >= 0.85);
    CHECK(rate <= 1.0);
    CHECK(std::abs(z_sum / static_cast<double>(valid)) < 0.5);
  }
}
