#pragma once

#include "hdtir/dataset.hpp"
#include "hdtir/types.hpp"

#include <optional>

namespace hdtir {

// Guard on the linear predictor |x'theta|. exp(30) ~ 1e13 is far outside any
// plausible tail exponent, so exceeding the cap signals a divergent iterate
// rather than a value worth evaluating.
inline constexpr double kLinkCap = 30.0;

// Tail negative log-likelihood
//   l(theta) = (1/n0) sum_i [ (exp(x_i'theta) + 1) m_i - x_i'theta ]
// with m_i = log(y_i/omega). Throws NumericError when the cap is exceeded.
double neg_log_likelihood(const TailSample& tail, const Vector& theta);

// Gradient: (1/n0) sum_i [ exp(x_i'theta) m_i - 1 ] x_i.
Vector score(const TailSample& tail, const Vector& theta);

// Hessian: (1/n0) sum_i m_i exp(x_i'theta) x_i x_i'. Symmetric PSD.
Matrix hessian(const TailSample& tail, const Vector& theta);

// hessian(tail, theta) * v without materializing the p x p matrix.
Vector hessian_vec(const TailSample& tail, const Vector& theta, const Vector& v);

namespace detail {
// Linear predictor X*theta with the cap check applied to every entry.
Vector linear_predictor(const TailSample& tail, const Vector& theta);

// Value and gradient in one pass. Returns nothing instead of throwing when
// the cap is exceeded, so line searches can treat the point as +infinity.
struct SmoothEval {
  double value = 0.0;
  double max_abs_eta = 0.0;
  Vector grad;
};
std::optional<SmoothEval> try_eval(const TailSample& tail, const Vector& theta);
}  // namespace detail

}  // namespace hdtir
