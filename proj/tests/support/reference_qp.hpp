#pragma once

#include "hdtir/types.hpp"

#include <Eigen/Cholesky>

#include <cmath>

namespace testsupport {

using hdtir::Index;
using hdtir::Matrix;
using hdtir::Vector;

// Independent reference for min u'Au s.t. ||Au - t||_inf <= g1,
// ||Xu||_inf <= g2 on small feasible instances: squared-hinge penalty with an
// increasing multiplier, minimized by damped (semismooth) Newton. Entirely
// separate from the ADMM path it checks.
inline Vector reference_qp(const Matrix& a, const Matrix& x, const Vector& t,
                           double g1, double g2) {
  const Index p = a.cols();
  Vector u = Vector::Zero(p);

  auto penalty_value = [&](const Vector& v, double mu) {
    double f = v.dot(a * v);
    const Vector r1 = a * v - t;
    for (Index k = 0; k < r1.size(); ++k) {
      const double over = std::abs(r1[k]) - g1;
      if (over > 0.0) f += mu * over * over;
    }
    const Vector r2 = x * v;
    for (Index k = 0; k < r2.size(); ++k) {
      const double over = std::abs(r2[k]) - g2;
      if (over > 0.0) f += mu * over * over;
    }
    return f;
  };

  for (double mu = 1e2; mu <= 1.0001e8; mu *= 10.0) {
    for (int newton = 0; newton < 80; ++newton) {
      Vector grad = 2.0 * (a * u);
      Matrix hess = 2.0 * a;
      const Vector r1 = a * u - t;
      for (Index k = 0; k < r1.size(); ++k) {
        const double over = std::abs(r1[k]) - g1;
        if (over > 0.0) {
          const double sign = r1[k] > 0.0 ? 1.0 : -1.0;
          grad += (2.0 * mu * over * sign) * a.row(k).transpose();
          hess += (2.0 * mu) * (a.row(k).transpose() * a.row(k));
        }
      }
      const Vector r2 = x * u;
      for (Index k = 0; k < r2.size(); ++k) {
        const double over = std::abs(r2[k]) - g2;
        if (over > 0.0) {
          const double sign = r2[k] > 0.0 ? 1.0 : -1.0;
          grad += (2.0 * mu * over * sign) * x.row(k).transpose();
          hess += (2.0 * mu) * (x.row(k).transpose() * x.row(k));
        }
      }
      if (grad.cwiseAbs().maxCoeff() < 1e-12 * std::max(1.0, mu * 1e-8)) break;
      hess.diagonal().array() += 1e-12 * std::max(1.0, hess.trace() / static_cast<double>(p));
      const Vector step = hess.ldlt().solve(grad);
      const double f0 = penalty_value(u, mu);
      double scale = 1.0;
      bool moved = false;
      for (int back = 0; back < 60; ++back) {
        const Vector trial = u - scale * step;
        if (penalty_value(trial, mu) <= f0) {
          u = trial;
          moved = true;
          break;
        }
        scale *= 0.5;
      }
      if (!moved) break;
    }
  }
  return u;
}

}  // namespace testsupport
