#pragma once

#include "hdtir/dataset.hpp"
#include "hdtir/types.hpp"

#include <optional>
#include <vector>

namespace hdtir {

struct LassoConfig {
  // Explicit penalty. When absent, the rule lambda = lambda_c * sqrt(log(p)/n0)
  // is applied with the n0 of the sample being fit.
  std::optional<double> lambda;
  double lambda_c = 1.0;
  int max_iter = 10000;
  double tol = 1e-8;  // KKT residual at which the fit counts as converged
  double backtracking_shrink = 0.5;
  std::optional<Vector> init;  // default: zero vector
  // When set, the penalized objective of every accepted iterate is appended
  // (the certificate tests assert this sequence is nonincreasing).
  std::vector<double>* objective_trace = nullptr;

  double resolve_lambda(Index n0, Index p) const;
  void validate() const;
};

struct LassoFit {
  Vector theta;
  double lambda = 0.0;
  double objective = 0.0;  // penalized objective at theta
  int iterations = 0;
  bool converged = false;
  double kkt_residual = 0.0;
  std::vector<Index> support;  // coordinates with theta[j] != 0
};

// lambda = c * sqrt(log(p) / n0), natural log. Requires p >= 2.
double default_lambda(Index n0, Index p, double c);

// Proximal operator of t*|.|: sign(z) * max(|z| - t, 0).
double soft_threshold(double z, double t);

// Stationarity certificate for the penalized problem: with g = score(theta),
// max over j of |g_j + lambda*sign(theta_j)| on the support and
// max(|g_j| - lambda, 0) off it. Zero iff theta is optimal.
double kkt_residual(const TailSample& tail, const Vector& theta, double lambda);

// Accelerated proximal gradient with backtracking on the smooth part and
// momentum restart whenever the penalized objective would increase, keeping
// the accepted objective sequence nonincreasing. Nonconvergence within
// max_iter is reported through the fit flags, not an exception; a divergent
// iterate (link cap exceeded at the start point) throws NumericError.
LassoFit fit_lasso(const TailSample& tail, const LassoConfig& config = {});

}  // namespace hdtir
