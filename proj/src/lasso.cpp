#include "hdtir/lasso.hpp"

#include "hdtir/likelihood.hpp"

#include <algorithm>
#include <cmath>

namespace hdtir {

double default_lambda(Index n0, Index p, double c) {
  if (n0 < 1) throw ConfigError("default_lambda: n0 must be at least 1");
  if (p < 2) throw ConfigError("default_lambda: rule requires p >= 2");
  if (c < 0.0) throw ConfigError("default_lambda: c must be nonnegative");
  return c * std::sqrt(std::log(static_cast<double>(p)) / static_cast<double>(n0));
}

double soft_threshold(double z, double t) {
  if (t < 0.0) throw ConfigError("soft_threshold: threshold must be nonnegative");
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

double LassoConfig::resolve_lambda(Index n0, Index p) const {
  if (lambda) {
    if (*lambda < 0.0) throw ConfigError("lasso: lambda must be nonnegative");
    return *lambda;
  }
  if (lambda_c == 0.0) return 0.0;  // unpenalized, rule degenerates cleanly
  return default_lambda(n0, p, lambda_c);
}

void LassoConfig::validate() const {
  if (max_iter < 1) throw ConfigError("lasso: max_iter must be at least 1");
  if (!(tol > 0.0)) throw ConfigError("lasso: tol must be positive");
  if (!(backtracking_shrink > 0.0 && backtracking_shrink < 1.0))
    throw ConfigError("lasso: backtracking_shrink must lie in (0,1)");
}

double kkt_residual(const TailSample& tail, const Vector& theta, double lambda) {
  const Vector g = score(tail, theta);
  double worst = 0.0;
  for (Index j = 0; j < g.size(); ++j) {
    double r;
    if (theta[j] > 0.0)
      r = std::abs(g[j] + lambda);
    else if (theta[j] < 0.0)
      r = std::abs(g[j] - lambda);
    else
      r = std::max(std::abs(g[j]) - lambda, 0.0);
    worst = std::max(worst, r);
  }
  return worst;
}

namespace {

Vector prox_step(const Vector& y, const Vector& grad, double step, double lambda) {
  Vector z(y.size());
  for (Index j = 0; j < y.size(); ++j)
    z[j] = soft_threshold(y[j] - step * grad[j], step * lambda);
  return z;
}

struct Accepted {
  Vector theta;
  double smooth;
  double objective;
};

// One proximal step from y with backtracking on the smooth majorization.
// L is updated in place. Returns nothing when no finite step exists.
std::optional<Accepted> backtracked_step(const TailSample& tail, const Vector& y,
                                         const detail::SmoothEval& at_y, double lambda,
                                         double shrink, double& L) {
  for (int attempt = 0; attempt < 120; ++attempt) {
    Vector z = prox_step(y, at_y.grad, 1.0 / L, lambda);
    if (auto fz = detail::try_eval(tail, z)) {
      const Vector d = z - y;
      const double quad = at_y.value + at_y.grad.dot(d) + 0.5 * L * d.squaredNorm();
      if (fz->value <= quad + 1e-12 * std::max(1.0, std::abs(quad))) {
        Accepted out;
        out.theta = std::move(z);
        out.smooth = fz->value;
        out.objective = fz->value + lambda * out.theta.lpNorm<1>();
        return out;
      }
    }
    L /= shrink;
  }
  return std::nullopt;
}

}  // namespace

LassoFit fit_lasso(const TailSample& tail, const LassoConfig& config) {
  config.validate();
  if (tail.size() < 1) throw DataError("fit_lasso: empty tail sample");
  const Index p = tail.dim();
  const double lambda = config.resolve_lambda(tail.size(), p);

  Vector theta = config.init.value_or(Vector::Zero(p));
  if (theta.size() != p) throw DataError("fit_lasso: init length does not match design width");
  auto at_theta = detail::try_eval(tail, theta);
  if (!at_theta) throw NumericError("fit_lasso: initial point exceeds the link cap");
  double objective = at_theta->value + lambda * theta.lpNorm<1>();

  // Initial step 1/L0 from one power-iteration pass on the Hessian at the
  // starting point; backtracking corrects any underestimate.
  double L = 1.0;
  if (p > 0) {
    const Vector v = Vector::Constant(p, 1.0 / std::sqrt(static_cast<double>(p)));
    const double est = hessian_vec(tail, theta, v).norm();
    if (std::isfinite(est) && est > 1e-12) L = est;
  }

  LassoFit fit;
  fit.lambda = lambda;
  fit.kkt_residual = kkt_residual(tail, theta, lambda);
  if (config.objective_trace) config.objective_trace->push_back(objective);
  if (fit.kkt_residual <= config.tol) {
    fit.theta = theta;
    fit.objective = objective;
    fit.converged = true;
  } else {
    Vector theta_prev = theta;
    double t_mom = 1.0;
    for (int iter = 0; iter < config.max_iter; ++iter) {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_mom * t_mom));
      Vector y = theta + ((t_mom - 1.0) / t_next) * (theta - theta_prev);

      auto at_y = detail::try_eval(tail, y);
      bool restarted = false;
      if (!at_y) {  // extrapolation overshot the cap; drop the momentum
        y = theta;
        at_y = at_theta;
        restarted = true;
      }
      auto acc = backtracked_step(tail, y, *at_y, lambda, config.backtracking_shrink, L);
      if (acc && acc->objective > objective && !restarted) {
        // Momentum restart: a plain proximal step from theta cannot increase
        // the objective, by the backtracking inequality.
        y = theta;
        acc = backtracked_step(tail, y, *at_theta, lambda, config.backtracking_shrink, L);
        restarted = true;
      }
      if (!acc) throw NumericError("fit_lasso: line search failed to find a finite step");

      theta_prev = theta;
      theta = acc->theta;
      objective = acc->objective;
      t_mom = restarted ? 1.0 : t_next;
      fit.iterations = iter + 1;
      if (config.objective_trace) config.objective_trace->push_back(objective);

      // Gradient at the accepted iterate, reused for the certificate and the
      // next restart if one happens.
      auto eval = detail::try_eval(tail, theta);
      if (!eval) throw NumericError("fit_lasso: accepted iterate exceeds the link cap");
      at_theta = *eval;
      if (at_theta->max_abs_eta > kLinkCap - 1e-3)
        throw NumericError("fit_lasso: iterates diverging into the link cap");

      double worst = 0.0;
      for (Index j = 0; j < p; ++j) {
        double r;
        if (theta[j] > 0.0)
          r = std::abs(at_theta->grad[j] + lambda);
        else if (theta[j] < 0.0)
          r = std::abs(at_theta->grad[j] - lambda);
        else
          r = std::max(std::abs(at_theta->grad[j]) - lambda, 0.0);
        worst = std::max(worst, r);
      }
      fit.kkt_residual = worst;
      if (worst <= config.tol) {
        fit.converged = true;
        break;
      }
    }
    fit.theta = theta;
    fit.objective = objective;
  }

  for (Index j = 0; j < p; ++j)
    if (fit.theta[j] != 0.0) fit.support.push_back(j);
  return fit;
}

}  // namespace hdtir
