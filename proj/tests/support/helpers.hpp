#pragma once

#include "hdtir/dataset.hpp"
#include "hdtir/likelihood.hpp"
#include "hdtir/types.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <random>

namespace testsupport {

using hdtir::Index;
using hdtir::Matrix;
using hdtir::TailSample;
using hdtir::Vector;

// Tail sample drawn from the conditional Pareto model: rows ~ N(0, x_scale^2),
// theta0 ~ N(0, theta_scale^2), m_i exponential with rate exp(x_i'theta0).
inline TailSample random_tail(std::mt19937_64& rng, Index n, Index p,
                              double x_scale = 1.0, double theta_scale = 0.3) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  Matrix x(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) x(i, j) = x_scale * normal(rng);
  Vector theta0(p);
  for (Index j = 0; j < p; ++j) theta0[j] = theta_scale * normal(rng);
  TailSample tail;
  tail.omega = 1.0;
  tail.rows = x;
  tail.log_exceedances.resize(n);
  for (Index i = 0; i < n; ++i) {
    const double alpha = std::exp(x.row(i).dot(theta0));
    tail.log_exceedances[i] = -std::log(1.0 - uniform(rng)) / alpha;
  }
  for (Index i = 0; i < n; ++i) tail.source_indices.push_back(i);
  return tail;
}

// Tail with prescribed rows and log-exceedances, for hand-built cases.
inline TailSample make_tail(Matrix rows, Vector m, double omega = 1.0) {
  TailSample tail;
  tail.omega = omega;
  tail.rows = std::move(rows);
  tail.log_exceedances = std::move(m);
  for (Index i = 0; i < tail.log_exceedances.size(); ++i)
    tail.source_indices.push_back(i);
  return tail;
}

inline double rel_inf_error(const Vector& got, const Vector& want) {
  const double scale = std::max(want.cwiseAbs().maxCoeff(), 1e-8);
  return (got - want).cwiseAbs().maxCoeff() / scale;
}

inline double rel_inf_error(const Matrix& got, const Matrix& want) {
  const double scale = std::max(want.cwiseAbs().maxCoeff(), 1e-8);
  return (got - want).cwiseAbs().maxCoeff() / scale;
}

// Central finite difference of the negative log-likelihood.
inline Vector fd_score(const TailSample& tail, const Vector& theta, double h = 1e-5) {
  Vector g(theta.size());
  for (Index j = 0; j < theta.size(); ++j) {
    Vector hi = theta, lo = theta;
    hi[j] += h;
    lo[j] -= h;
    g[j] = (hdtir::neg_log_likelihood(tail, hi) - hdtir::neg_log_likelihood(tail, lo)) /
           (2.0 * h);
  }
  return g;
}

// Central finite difference of the score, column by column.
inline Matrix fd_hessian(const TailSample& tail, const Vector& theta, double h = 1e-5) {
  const Index p = theta.size();
  Matrix m(p, p);
  for (Index j = 0; j < p; ++j) {
    Vector hi = theta, lo = theta;
    hi[j] += h;
    lo[j] -= h;
    m.col(j) = (hdtir::score(tail, hi) - hdtir::score(tail, lo)) / (2.0 * h);
  }
  return m;
}

// Damped Newton solve of score(theta) = 0; the low-dimensional MLE oracle.
inline Vector newton_mle(const TailSample& tail, Vector theta, int max_iter = 200) {
  for (int it = 0; it < max_iter; ++it) {
    const Vector g = hdtir::score(tail, theta);
    if (g.cwiseAbs().maxCoeff() < 1e-13) break;
    Matrix h = hdtir::hessian(tail, theta);
    h.diagonal().array() += 1e-12;
    const Vector step = h.ldlt().solve(g);
    double scale = 1.0;
    const double f0 = hdtir::neg_log_likelihood(tail, theta);
    for (int back = 0; back < 60; ++back) {
      const Vector trial = theta - scale * step;
      bool ok = true;
      double f1 = 0.0;
      try {
        f1 = hdtir::neg_log_likelihood(tail, trial);
      } catch (const hdtir::NumericError&) {
        ok = false;
      }
      if (ok && f1 <= f0) {
        theta = trial;
        break;
      }
      scale *= 0.5;
    }
  }
  return theta;
}

}  // namespace testsupport
