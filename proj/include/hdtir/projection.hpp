#pragma once

#include "hdtir/dataset.hpp"
#include "hdtir/types.hpp"

#include <optional>
#include <string>
#include <utility>

namespace hdtir {

struct ProjectionConfig {
  // Explicit gamma values; when absent the rules gamma1 = c'*sqrt(log(p)/n)
  // and gamma2 = c''*sqrt(log(n)) apply with the n of the gram subsample.
  std::optional<double> gamma1;
  double gamma1_c = 1.0;
  std::optional<double> gamma2;
  double gamma2_c = 100.0;
  double solver_tol = 1e-6;
  int max_iter = 10000;
  // On infeasibility gamma1 is grown geometrically, at most max_escalations
  // times; gamma1_used in the result records the final value.
  double feasibility_escalation = 1.5;
  int max_escalations = 10;

  std::pair<double, double> resolve(Index n_rows, Index p) const;
  void validate() const;
};

// (c'*sqrt(log(p)/n0), c''*sqrt(log(n0))). Degenerate sizes or nonpositive
// constants are rejected.
std::pair<double, double> projection_tuning(Index n0, Index p, double c_prime,
                                            double c_dprime);

// Weighted Gram operator (1/n) sum_i m_i exp(x_i'theta) x_i x_i' over a
// subsample; identical to the likelihood Hessian on the same rows.
class WeightedGram {
 public:
  WeightedGram(const TailSample& tail, const Vector& theta);

  Index dim() const { return rows_.cols(); }
  Index row_count() const { return rows_.rows(); }
  Vector apply(const Vector& v) const;
  const Matrix& dense() const { return dense_; }
  const Matrix& rows() const { return rows_; }
  const Vector& weights() const { return weights_; }

 private:
  Matrix rows_;
  Vector weights_;  // m_i * exp(x_i'theta)
  Matrix dense_;
};

WeightedGram weighted_gram(const TailSample& tail, const Vector& theta);

struct ProjectionDirection {
  Vector u;
  double objective = 0.0;    // u' A u
  double gram_gap = 0.0;     // ||A u - target||_inf
  double row_gap = 0.0;      // max_i |x_i' u|
  double gamma1_used = 0.0;  // after any escalation
};

struct ProjectionResult {
  bool ok = false;
  ProjectionDirection direction;
  int iterations = 0;
  int escalations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  std::string message;
};

// Minimizes u'Au subject to ||Au - target||_inf <= gamma1 and
// max_i |x_i'u| <= gamma2, by ADMM with the two constraint images projected
// onto their boxes. The row constraint is first dropped and reinstated only
// if the relaxed minimizer violates it, which is exact: a relaxed optimum
// that is feasible for the full problem is optimal for it.
//
// Caches the row-product Gram blocks so repeated targets over the same gram
// (all coordinates of one fold) share the setup cost.
class ProjectionSolver {
 public:
  ProjectionSolver(const WeightedGram& gram, const ProjectionConfig& config);
  ProjectionResult solve(const Vector& target) const;

 private:
  struct AdmmOutcome {
    bool converged = false;
    Vector u;
    int iterations = 0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
  };
  AdmmOutcome run_admm(const Vector& target, double gamma1, double gamma2,
                       bool with_rows, const Vector& warm_start) const;

  const WeightedGram& gram_;
  ProjectionConfig config_;
  double gamma1_ = 0.0;
  double gamma2_ = 0.0;
  Matrix gram_sq_;   // A'A
  Matrix rows_sq_;   // X'X
  double scale_obj_ = 1.0;
  double scale_gram_ = 1.0;  // constraint-block scalings for the penalty
  double scale_rows_ = 1.0;
};

// One-shot convenience wrapper around ProjectionSolver.
ProjectionResult solve_projection(const WeightedGram& gram, const Vector& target,
                                  const ProjectionConfig& config);

}  // namespace hdtir
