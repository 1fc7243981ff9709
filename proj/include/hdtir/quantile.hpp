#pragma once

#include "hdtir/dataset.hpp"
#include "hdtir/debias.hpp"
#include "hdtir/types.hpp"

namespace hdtir {

// Conditional tau-quantile of Y above the threshold at covariates x:
// omega * (1 - tau)^(-exp(-x'theta)).
double conditional_quantile(const Vector& theta, const Vector& x, double omega, double tau);

// Derivative of s -> omega*(1-tau)^(-exp(-s)) at s = x'theta, in closed form:
// with a = exp(-s) and L = log(1-tau), dq/ds = omega * exp(-a*L) * L * a.
// Negative for every tau in (0,1).
double quantile_derivative(const Vector& theta, const Vector& x, double omega, double tau);

// Unconditional level matching the conditional tau above the threshold:
// 1 - (1-tau)*(1 - F_{Y|X}(omega)). The conditional CDF value is supplied by
// the caller.
double integrated_tau(double tau, double f_omega);

struct QuantileEstimate {
  double tau = 0.0;
  Vector x;
  double q_hat = 0.0;
  double se = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double v3 = 0.0;          // fold-averaged quadratic form of the x-target direction
  double link_tilde = 0.0;  // debiased x'theta
  double link_hat = 0.0;    // x'theta at the full-tail lasso fit (delta method point)
  Index n0 = 0;
  int K = 0;
  bool ci_truncated = false;  // lower bound clipped at omega
};

// Cross-fit extreme-quantile inference: every coordinate is debiased with
// the fold machinery, the variance comes from the x-target projection per
// fold, and the delta method is evaluated at the full-tail lasso fit.
QuantileEstimate quantile_inference(const TailSample& tail, const Vector& x, double tau,
                                    int K, const DebiasOptions& options);

}  // namespace hdtir
