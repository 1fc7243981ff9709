#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hdtir/likelihood.hpp"
#include "support/helpers.hpp"

#include <cmath>
#include <random>

using namespace hdtir;
using testsupport::make_tail;
using testsupport::random_tail;

TEST_CASE("negative log-likelihood closed forms") {
  const TailSample one = make_tail(Matrix::Ones(1, 1), Vector::Ones(1));
  CHECK(neg_log_likelihood(one, Vector::Zero(1)) == doctest::Approx(2.0).epsilon(1e-14));

  std::mt19937_64 rng(2);
  const TailSample tail = random_tail(rng, 40, 3);
  const double at_zero = neg_log_likelihood(tail, Vector::Zero(3));
  CHECK(at_zero == doctest::Approx(2.0 * tail.log_exceedances.mean()).epsilon(1e-12));

  // Intercept-only with mean(m) = 1/2 at theta = log 2.
  Vector m(2);
  m << 0.25, 0.75;
  const TailSample intercept = make_tail(Matrix::Ones(2, 1), m);
  Vector theta(1);
  theta << std::log(2.0);
  CHECK(neg_log_likelihood(intercept, theta) ==
        doctest::Approx(1.5 - std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("score closed forms and the Hill stationary point") {
  std::mt19937_64 rng(3);
  const TailSample tail = random_tail(rng, 30, 4);
  const Vector got = score(tail, Vector::Zero(4));
  const Vector want = tail.rows.transpose() * (tail.log_exceedances.array() - 1.0).matrix() /
                      static_cast<double>(tail.size());
  CHECK((got - want).cwiseAbs().maxCoeff() < 1e-14);

  Vector m(2);
  m << 0.25, 0.75;
  const TailSample intercept = make_tail(Matrix::Ones(2, 1), m);
  Vector theta(1);
  theta << std::log(2.0);
  CHECK(std::abs(score(intercept, theta)[0]) < 1e-14);

  // theta* = -log(mean(m)) kills the score for any intercept-only tail.
  const TailSample bigger = make_tail(Matrix::Ones(25, 1), random_tail(rng, 25, 1).log_exceedances);
  Vector star(1);
  star << -std::log(bigger.log_exceedances.mean());
  CHECK(std::abs(score(bigger, star)[0]) < 1e-12);
}

TEST_CASE("score and hessian match central finite differences") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<Index> pick_p(2, 20), pick_n(5, 200);
  for (int rep = 0; rep < 10; ++rep) {
    const Index p = pick_p(rng), n = pick_n(rng);
    const TailSample tail = random_tail(rng, n, p, 0.8, 0.4);
    Vector theta(p);
    std::normal_distribution<double> normal(0.0, 0.3);
    for (Index j = 0; j < p; ++j) theta[j] = normal(rng);

    CHECK(testsupport::rel_inf_error(score(tail, theta), testsupport::fd_score(tail, theta)) <
          1e-6);
    CHECK(testsupport::rel_inf_error(hessian(tail, theta),
                                     testsupport::fd_hessian(tail, theta)) < 1e-5);
  }
}

TEST_CASE("hessian closed forms") {
  Matrix x(1, 2);
  x << 1.0, 0.0;
  Vector m(1);
  m << 2.0;
  const Matrix h = hessian(make_tail(x, m), Vector::Zero(2));
  CHECK(h(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(h(0, 1) == 0.0);
  CHECK(h(1, 1) == 0.0);

  std::mt19937_64 rng(11);
  const TailSample tail = random_tail(rng, 50, 3);
  const Matrix at_zero = hessian(tail, Vector::Zero(3));
  const Matrix want = tail.rows.transpose() * tail.log_exceedances.asDiagonal() * tail.rows /
                      static_cast<double>(tail.size());
  CHECK((at_zero - want).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("hessian_vec agrees with the dense product") {
  std::mt19937_64 rng(13);
  const Index p = 15;
  const TailSample tail = random_tail(rng, 80, p);
  std::normal_distribution<double> normal(0.0, 0.5);
  Vector theta(p), v(p);
  for (Index j = 0; j < p; ++j) {
    theta[j] = 0.2 * normal(rng);
    v[j] = normal(rng);
  }
  CHECK(hessian_vec(tail, theta, Vector::Zero(p)).cwiseAbs().maxCoeff() == 0.0);

  const Matrix h = hessian(tail, theta);
  for (Index j = 0; j < p; ++j) {
    Vector ej = Vector::Zero(p);
    ej[j] = 1.0;
    CHECK(testsupport::rel_inf_error(hessian_vec(tail, theta, ej), Vector(h.col(j))) < 1e-10);
  }
  CHECK(testsupport::rel_inf_error(hessian_vec(tail, theta, v), Vector(h * v)) < 1e-10);
}

TEST_CASE("convexity along segments and PSD quadratic forms") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> normal(0.0, 0.4);
  for (int rep = 0; rep < 20; ++rep) {
    const Index p = 5;
    const TailSample tail = random_tail(rng, 40, p);
    Vector a(p), b(p), v(p);
    for (Index j = 0; j < p; ++j) {
      a[j] = normal(rng);
      b[j] = normal(rng);
      v[j] = normal(rng);
    }
    const double mid = neg_log_likelihood(tail, (a + b) / 2.0);
    const double avg = 0.5 * (neg_log_likelihood(tail, a) + neg_log_likelihood(tail, b));
    CHECK(mid <= avg + 1e-12);
    CHECK(v.dot(hessian(tail, a) * v) >= -1e-12);
  }
}

TEST_CASE("evaluators are invariant to exceedance order") {
  std::mt19937_64 rng(19);
  const Index n = 35, p = 4;
  TailSample tail = random_tail(rng, n, p);
  Vector theta(p);
  theta << 0.1, -0.2, 0.3, 0.05;

  TailSample reversed = tail;
  reversed.rows = tail.rows.colwise().reverse().eval();
  reversed.log_exceedances = tail.log_exceedances.reverse().eval();
  CHECK(neg_log_likelihood(tail, theta) ==
        doctest::Approx(neg_log_likelihood(reversed, theta)).epsilon(1e-13));
  CHECK((score(tail, theta) - score(reversed, theta)).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((hessian(tail, theta) - hessian(reversed, theta)).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("link cap and dimension errors") {
  const TailSample one = make_tail(Matrix::Ones(1, 1), Vector::Ones(1));
  Vector big(1);
  big << 31.0;
  CHECK_THROWS_AS(neg_log_likelihood(one, big), NumericError);
  CHECK_THROWS_AS(score(one, big), NumericError);
  CHECK_THROWS_AS(neg_log_likelihood(one, Vector::Zero(2)), DataError);
  // 30 is inside the guard; just below the boundary evaluates.
  Vector edge(1);
  edge << 29.999;
  CHECK(std::isfinite(neg_log_likelihood(one, edge)));
}
