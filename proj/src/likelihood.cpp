#include "hdtir/likelihood.hpp"

#include <cmath>

namespace hdtir {

namespace detail {

Vector linear_predictor(const TailSample& tail, const Vector& theta) {
  if (theta.size() != tail.dim())
    throw DataError("likelihood: theta length does not match design width");
  Vector eta = tail.rows * theta;
  for (Index i = 0; i < eta.size(); ++i) {
    if (!std::isfinite(eta[i]) || std::abs(eta[i]) > kLinkCap)
      throw NumericError("likelihood: linear predictor exceeds the link cap");
  }
  return eta;
}

std::optional<SmoothEval> try_eval(const TailSample& tail, const Vector& theta) {
  if (theta.size() != tail.dim())
    throw DataError("likelihood: theta length does not match design width");
  Vector eta = tail.rows * theta;
  const Vector& m = tail.log_exceedances;
  const auto n0 = static_cast<double>(eta.size());
  double value = 0.0;
  double max_eta = 0.0;
  Vector w(eta.size());
  for (Index i = 0; i < eta.size(); ++i) {
    if (!std::isfinite(eta[i]) || std::abs(eta[i]) > kLinkCap) return std::nullopt;
    max_eta = std::max(max_eta, std::abs(eta[i]));
    const double e = std::exp(eta[i]);
    value += (e + 1.0) * m[i] - eta[i];
    w[i] = e * m[i] - 1.0;
  }
  SmoothEval out;
  out.value = value / n0;
  out.max_abs_eta = max_eta;
  out.grad = tail.rows.transpose() * w / n0;
  return out;
}

}  // namespace detail

double neg_log_likelihood(const TailSample& tail, const Vector& theta) {
  const Vector eta = detail::linear_predictor(tail, theta);
  const Vector& m = tail.log_exceedances;
  double acc = 0.0;
  for (Index i = 0; i < eta.size(); ++i)
    acc += (std::exp(eta[i]) + 1.0) * m[i] - eta[i];
  return acc / static_cast<double>(eta.size());
}

Vector score(const TailSample& tail, const Vector& theta) {
  const Vector eta = detail::linear_predictor(tail, theta);
  const Vector& m = tail.log_exceedances;
  Vector w(eta.size());
  for (Index i = 0; i < eta.size(); ++i) w[i] = std::exp(eta[i]) * m[i] - 1.0;
  return tail.rows.transpose() * w / static_cast<double>(eta.size());
}

Matrix hessian(const TailSample& tail, const Vector& theta) {
  const Vector eta = detail::linear_predictor(tail, theta);
  const Vector& m = tail.log_exceedances;
  Vector w(eta.size());
  for (Index i = 0; i < eta.size(); ++i) w[i] = m[i] * std::exp(eta[i]);
  Matrix h = tail.rows.transpose() * w.asDiagonal() * tail.rows /
             static_cast<double>(eta.size());
  // Exact symmetry for downstream factorizations.
  h = ((h + h.transpose()) * 0.5).eval();
  return h;
}

Vector hessian_vec(const TailSample& tail, const Vector& theta, const Vector& v) {
  if (v.size() != tail.dim())
    throw DataError("hessian_vec: vector length does not match design width");
  const Vector eta = detail::linear_predictor(tail, theta);
  const Vector& m = tail.log_exceedances;
  Vector t = tail.rows * v;
  for (Index i = 0; i < t.size(); ++i) t[i] *= m[i] * std::exp(eta[i]);
  return tail.rows.transpose() * t / static_cast<double>(eta.size());
}

}  // namespace hdtir
