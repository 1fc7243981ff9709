#include "hdtir/quantile.hpp"

#include "hdtir/likelihood.hpp"
#include "hdtir/normal.hpp"

#include <cmath>
#include <numeric>

namespace hdtir {

namespace {

double checked_link(const Vector& theta, const Vector& x) {
  if (theta.size() != x.size())
    throw DataError("quantile: covariate length does not match theta");
  const double s = x.dot(theta);
  if (!std::isfinite(s) || std::abs(s) > kLinkCap)
    throw NumericError("quantile: linear predictor exceeds the link cap");
  return s;
}

void check_tau(double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw ConfigError("quantile: tau must lie in (0,1)");
}

}  // namespace

double conditional_quantile(const Vector& theta, const Vector& x, double omega, double tau) {
  check_tau(tau);
  if (!(omega > 0.0)) throw ConfigError("quantile: omega must be positive");
  const double s = checked_link(theta, x);
  return omega * std::pow(1.0 - tau, -std::exp(-s));
}

double quantile_derivative(const Vector& theta, const Vector& x, double omega, double tau) {
  check_tau(tau);
  if (!(omega > 0.0)) throw ConfigError("quantile: omega must be positive");
  const double s = checked_link(theta, x);
  const double a = std::exp(-s);
  const double big_l = std::log(1.0 - tau);
  return omega * std::exp(-a * big_l) * big_l * a;
}

double integrated_tau(double tau, double f_omega) {
  check_tau(tau);
  if (!(f_omega >= 0.0 && f_omega < 1.0))
    throw ConfigError("integrated_tau: F(omega) must lie in [0,1)");
  return 1.0 - (1.0 - tau) * (1.0 - f_omega);
}

QuantileEstimate quantile_inference(const TailSample& tail, const Vector& x, double tau,
                                    int K, const DebiasOptions& options) {
  check_tau(tau);
  if (x.size() != tail.dim())
    throw DataError("quantile_inference: covariate length does not match design width");

  const CrossFitParts parts = cross_fit_parts(tail, K, options);
  const auto solvers = make_projection_solvers(parts, options.projection);

  // Debias every coordinate, then plug the debiased vector into q.
  std::vector<Index> coords(static_cast<std::size_t>(tail.dim()));
  std::iota(coords.begin(), coords.end(), Index{0});
  const auto coefficients = debias_coords_on_parts(parts, solvers, coords, options);
  Vector theta_tilde(tail.dim());
  for (const auto& c : coefficients) {
    if (c.failed)
      throw NumericError("quantile_inference: coordinate " + std::to_string(c.coord) +
                         " failed: " + c.message);
    theta_tilde[c.coord] = c.theta_tilde;
  }

  // Variance of x'theta_tilde via the x-target projection, fold-averaged.
  const auto n_folds = solvers.size();
  double v3 = 0.0;
  for (std::size_t k = 0; k < n_folds; ++k) {
    const ProjectionResult proj = solvers[k].solve(x);
    if (!proj.ok)
      throw NumericError("quantile_inference: x-target projection failed: " + proj.message);
    const Vector& u = proj.direction.u;
    v3 += u.dot(parts.correction_grams[k].apply(u));
  }
  v3 /= static_cast<double>(n_folds);

  const LassoFit full_fit = fit_lasso(tail, options.lasso);

  QuantileEstimate est;
  est.tau = tau;
  est.x = x;
  est.n0 = tail.size();
  est.K = K;
  est.v3 = v3;
  est.link_tilde = checked_link(theta_tilde, x);
  est.link_hat = checked_link(full_fit.theta, x);
  est.q_hat = conditional_quantile(theta_tilde, x, tail.omega, tau);
  const double slope = quantile_derivative(full_fit.theta, x, tail.omega, tau);
  est.se = std::abs(slope) * std::sqrt(std::max(v3, 0.0) / parts.n_correction_mean);
  if (est.se > 0.0) {
    const double half = normal_quantile(1.0 - (1.0 - options.level) / 2.0) * est.se;
    est.ci_low = est.q_hat - half;
    est.ci_high = est.q_hat + half;
    if (est.ci_low < tail.omega) {
      est.ci_low = tail.omega;  // the model constrains q to [omega, inf)
      est.ci_truncated = true;
    }
  } else {
    est.ci_low = est.q_hat;
    est.ci_high = est.q_hat;
  }
  return est;
}

}  // namespace hdtir
