#include "hdtir/projection.hpp"

#include "hdtir/likelihood.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>

namespace hdtir {

std::pair<double, double> projection_tuning(Index n0, Index p, double c_prime,
                                            double c_dprime) {
  if (n0 < 2 || p < 2) throw ConfigError("projection_tuning: degenerate sizes");
  if (!(c_prime > 0.0) || !(c_dprime > 0.0))
    throw ConfigError("projection_tuning: constants must be positive");
  const double g1 =
      c_prime * std::sqrt(std::log(static_cast<double>(p)) / static_cast<double>(n0));
  const double g2 = c_dprime * std::sqrt(std::log(static_cast<double>(n0)));
  return {g1, g2};
}

void ProjectionConfig::validate() const {
  if (gamma1 && !(*gamma1 > 0.0)) throw ConfigError("projection: gamma1 must be positive");
  if (gamma2 && !(*gamma2 > 0.0)) throw ConfigError("projection: gamma2 must be positive");
  if (!(solver_tol > 0.0)) throw ConfigError("projection: solver_tol must be positive");
  if (max_iter < 1) throw ConfigError("projection: max_iter must be at least 1");
  if (!(feasibility_escalation > 1.0))
    throw ConfigError("projection: feasibility_escalation must exceed 1");
  if (max_escalations < 0) throw ConfigError("projection: max_escalations must be >= 0");
}

std::pair<double, double> ProjectionConfig::resolve(Index n_rows, Index p) const {
  validate();
  if (gamma1 && gamma2) return {*gamma1, *gamma2};
  auto [g1, g2] = projection_tuning(n_rows, p, gamma1_c, gamma2_c);
  return {gamma1 ? *gamma1 : g1, gamma2 ? *gamma2 : g2};
}

WeightedGram::WeightedGram(const TailSample& tail, const Vector& theta) {
  const Vector eta = detail::linear_predictor(tail, theta);
  rows_ = tail.rows;
  weights_.resize(eta.size());
  for (Index i = 0; i < eta.size(); ++i)
    weights_[i] = tail.log_exceedances[i] * std::exp(eta[i]);
  dense_ = rows_.transpose() * weights_.asDiagonal() * rows_ /
           static_cast<double>(rows_.rows());
  dense_ = ((dense_ + dense_.transpose()) * 0.5).eval();
}

Vector WeightedGram::apply(const Vector& v) const {
  if (v.size() != dim()) throw DataError("weighted_gram: vector length mismatch");
  Vector t = rows_ * v;
  t.array() *= weights_.array();
  return rows_.transpose() * t / static_cast<double>(rows_.rows());
}

WeightedGram weighted_gram(const TailSample& tail, const Vector& theta) {
  return WeightedGram(tail, theta);
}

namespace {

double inf_norm(const Vector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

Vector clamp_box(const Vector& v, double h) {
  return v.cwiseMax(-h).cwiseMin(h);
}

}  // namespace

ProjectionSolver::ProjectionSolver(const WeightedGram& gram, const ProjectionConfig& config)
    : gram_(gram), config_(config) {
  std::tie(gamma1_, gamma2_) = config_.resolve(gram.row_count(), gram.dim());
  const Matrix& a = gram_.dense();
  const Matrix& x = gram_.rows();
  gram_sq_ = a.transpose() * a;
  rows_sq_ = x.transpose() * x;

  const double p = static_cast<double>(gram_.dim());
  scale_obj_ = std::max(a.trace() / p, 1e-10);
  // Penalty scalings put both constraint blocks on a comparable footing.
  const double a_norm = a.norm() / std::sqrt(p);
  const double x_row_rms = std::sqrt(rows_sq_.trace() / std::max(1.0, static_cast<double>(x.rows())));
  scale_gram_ = 1.0 / std::max(a_norm * a_norm, 1e-12);
  scale_rows_ = 1.0 / std::max(x_row_rms * x_row_rms, 1e-12);
}

ProjectionSolver::AdmmOutcome ProjectionSolver::run_admm(const Vector& target,
                                                         double gamma1, double gamma2,
                                                         bool with_rows,
                                                         const Vector& warm_start) const {
  const Matrix& a = gram_.dense();
  const Matrix& x = gram_.rows();
  const Index p = gram_.dim();
  const Index n = with_rows ? x.rows() : 0;

  double rho = scale_obj_;
  auto factor = [&](double r) {
    Matrix m = 2.0 * a + (r * scale_gram_) * gram_sq_;
    if (with_rows) m += (r * scale_rows_) * rows_sq_;
    m.diagonal().array() += 1e-12 * std::max(1.0, m.trace() / static_cast<double>(p));
    return Eigen::LDLT<Matrix>(m);
  };
  Eigen::LDLT<Matrix> ldlt = factor(rho);

  Vector u = warm_start;
  Vector w1 = a * u - target;
  Vector z1 = clamp_box(w1, gamma1);
  Vector s1 = Vector::Zero(p);
  Vector w2, z2, s2;
  if (with_rows) {
    w2 = x * u;
    z2 = clamp_box(w2, gamma2);
    s2 = Vector::Zero(n);
  }

  AdmmOutcome out;
  double primal_norm = 0.0, dual_norm = 0.0;
  for (int iter = 0; iter < config_.max_iter; ++iter) {
    Vector rhs = (rho * scale_gram_) * (a.transpose() * (target + z1 - s1));
    if (with_rows) rhs += (rho * scale_rows_) * (x.transpose() * (z2 - s2));
    u = ldlt.solve(rhs);

    w1 = a * u - target;
    const Vector z1_prev = z1;
    z1 = clamp_box(w1 + s1, gamma1);
    s1 += w1 - z1;
    Vector dual = (rho * scale_gram_) * (a.transpose() * (z1 - z1_prev));
    primal_norm = inf_norm(w1 - z1);
    if (with_rows) {
      w2 = x * u;
      const Vector z2_prev = z2;
      z2 = clamp_box(w2 + s2, gamma2);
      s2 += w2 - z2;
      dual += (rho * scale_rows_) * (x.transpose() * (z2 - z2_prev));
      primal_norm = std::max(primal_norm, inf_norm(w2 - z2));
    }
    dual_norm = inf_norm(dual);

    const double eps_pri = config_.solver_tol;
    const double eps_dual = config_.solver_tol * std::max(1.0, inf_norm(2.0 * (a * u)));
    out.iterations = iter + 1;
    if (primal_norm <= eps_pri && dual_norm <= eps_dual) {
      out.converged = true;
      break;
    }

    // Residual balancing on normalized residuals; the scaled duals shrink or
    // grow with 1/rho.
    if ((iter + 1) % 25 == 0) {
      const double pn = primal_norm / eps_pri;
      const double dn = dual_norm / eps_dual;
      double next = rho;
      if (pn > 10.0 * dn)
        next = rho * 2.0;
      else if (dn > 10.0 * pn)
        next = rho * 0.5;
      next = std::clamp(next, scale_obj_ * 1e-6, scale_obj_ * 1e6);
      if (next != rho) {
        const double ratio = rho / next;
        s1 *= ratio;
        if (with_rows) s2 *= ratio;
        rho = next;
        ldlt = factor(rho);
      }
    }
  }
  out.u = u;
  out.primal_residual = primal_norm;
  out.dual_residual = dual_norm;
  return out;
}

ProjectionResult ProjectionSolver::solve(const Vector& target) const {
  if (target.size() != gram_.dim())
    throw DataError("solve_projection: target length does not match gram dimension");
  const Matrix& a = gram_.dense();
  const Matrix& x = gram_.rows();

  // Start from the scaled target, pulled inside the row box.
  const double curvature = target.dot(a * target) / std::max(target.squaredNorm(), 1e-10);
  Vector u_init = target / std::max(curvature, 1e-10);
  const double init_rows = inf_norm(x * u_init);
  if (init_rows > gamma2_) u_init *= gamma2_ / init_rows;

  ProjectionResult res;
  double gamma1 = gamma1_;
  for (int esc = 0; esc <= config_.max_escalations; ++esc) {
    AdmmOutcome relaxed = run_admm(target, gamma1, gamma2_, false, u_init);
    AdmmOutcome* chosen = &relaxed;
    AdmmOutcome full;
    if (relaxed.converged && inf_norm(x * relaxed.u) > gamma2_) {
      full = run_admm(target, gamma1, gamma2_, true, relaxed.u);
      chosen = &full;
    } else if (!relaxed.converged) {
      full = run_admm(target, gamma1, gamma2_, true, relaxed.u);
      chosen = &full;
    }
    res.iterations += relaxed.iterations + full.iterations;
    res.escalations = esc;
    res.primal_residual = chosen->primal_residual;
    res.dual_residual = chosen->dual_residual;

    if (chosen->converged) {
      Vector u = chosen->u;
      double objective = u.dot(a * u);
      // The heuristic start is occasionally feasible and better; returning
      // it keeps the objective-vs-initialization contract exact.
      const double init_obj = u_init.dot(a * u_init);
      if (init_obj < objective && inf_norm(a * u_init - target) <= gamma1 &&
          inf_norm(x * u_init) <= gamma2_) {
        u = u_init;
        objective = init_obj;
      }
      ProjectionDirection dir;
      dir.u = u;
      dir.objective = objective;
      dir.gram_gap = inf_norm(a * u - target);
      dir.row_gap = inf_norm(x * u);
      dir.gamma1_used = gamma1;
      if (dir.gram_gap <= gamma1 + config_.solver_tol &&
          dir.row_gap <= gamma2_ + config_.solver_tol) {
        res.ok = true;
        res.direction = std::move(dir);
        return res;
      }
    }
    u_init = chosen->u;  // warm start the escalated problem
    gamma1 *= config_.feasibility_escalation;
  }
  res.ok = false;
  res.message = "projection did not reach feasibility within the escalation budget";
  return res;
}

ProjectionResult solve_projection(const WeightedGram& gram, const Vector& target,
                                  const ProjectionConfig& config) {
  ProjectionSolver solver(gram, config);
  return solver.solve(target);
}

}  // namespace hdtir
