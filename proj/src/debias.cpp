#include "hdtir/debias.hpp"

#include "hdtir/likelihood.hpp"
#include "hdtir/normal.hpp"
#include "hdtir/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace hdtir {

std::vector<std::vector<Index>> FoldPlan::fold_indices() const {
  std::vector<std::vector<Index>> folds(static_cast<std::size_t>(K));
  for (std::size_t i = 0; i < assignments.size(); ++i)
    folds[static_cast<std::size_t>(assignments[i])].push_back(static_cast<Index>(i));
  return folds;
}

std::vector<std::vector<Index>> FoldPlan::complement_indices() const {
  std::vector<std::vector<Index>> comps(static_cast<std::size_t>(K));
  for (std::size_t i = 0; i < assignments.size(); ++i)
    for (int k = 0; k < K; ++k)
      if (k != assignments[i]) comps[static_cast<std::size_t>(k)].push_back(static_cast<Index>(i));
  return comps;
}

FoldPlan make_folds(Index n0, int K, std::uint64_t seed) {
  if (K < 2 || static_cast<Index>(K) > n0)
    throw ConfigError("make_folds: K must lie in [2, n0]");
  std::vector<Index> perm(static_cast<std::size_t>(n0));
  std::iota(perm.begin(), perm.end(), Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);

  FoldPlan plan;
  plan.K = K;
  plan.seed = seed;
  plan.assignments.assign(static_cast<std::size_t>(n0), 0);
  const Index base = n0 / K;
  const Index remainder = n0 % K;
  std::size_t pos = 0;
  for (int k = 0; k < K; ++k) {
    const Index size = base + (static_cast<Index>(k) < remainder ? 1 : 0);
    for (Index c = 0; c < size; ++c)
      plan.assignments[static_cast<std::size_t>(perm[pos++])] = k;
  }
  return plan;
}

std::pair<double, double> confidence_interval(double theta_tilde, double variance,
                                              double n_eff, double level) {
  if (!(variance > 0.0)) throw ConfigError("confidence_interval: variance must be positive");
  if (!(n_eff > 0.0)) throw ConfigError("confidence_interval: n_eff must be positive");
  if (!(level > 0.0 && level < 1.0))
    throw ConfigError("confidence_interval: level must lie in (0,1)");
  const double half = normal_quantile(1.0 - (1.0 - level) / 2.0) * std::sqrt(variance / n_eff);
  return {theta_tilde - half, theta_tilde + half};
}

namespace {

CorrectionFold default_fold(const DebiasOptions& options, CorrectionFold fallback) {
  return options.correction_fold.value_or(fallback);
}

// Assembles one coefficient from fold-level pieces. Every vector has one
// entry per fold (a single entry for sample splitting).
DebiasedCoefficient assemble_coefficient(Index coord, const std::vector<double>& theta_hats,
                                         const std::vector<double>& corrections,
                                         const std::vector<double>& variances,
                                         const std::vector<double>& gammas, double n_corr,
                                         double level) {
  DebiasedCoefficient c;
  c.coord = coord;
  const auto k = static_cast<double>(theta_hats.size());
  c.theta_hat = std::accumulate(theta_hats.begin(), theta_hats.end(), 0.0) / k;
  const double tilde_sum =
      std::inner_product(theta_hats.begin(), theta_hats.end(), corrections.begin(), 0.0,
                         std::plus<>(), std::minus<>());
  c.theta_tilde = tilde_sum / k;
  c.variance = std::accumulate(variances.begin(), variances.end(), 0.0) / k;
  c.gamma1_used = *std::max_element(gammas.begin(), gammas.end());
  c.n_inference = n_corr;
  if (c.variance > 0.0) {
    c.se = std::sqrt(c.variance / n_corr);
    c.z = c.theta_tilde / c.se;
    std::tie(c.ci_low, c.ci_high) = confidence_interval(c.theta_tilde, c.variance, n_corr, level);
  } else {
    c.failed = true;
    c.message = "degenerate variance estimate";
  }
  return c;
}

DebiasedCoefficient failed_coefficient(Index coord, const std::string& message) {
  DebiasedCoefficient c;
  c.coord = coord;
  c.failed = true;
  c.message = message;
  c.theta_tilde = std::numeric_limits<double>::quiet_NaN();
  c.se = std::numeric_limits<double>::quiet_NaN();
  return c;
}

void check_coords(const std::vector<Index>& coords, Index p) {
  for (Index j : coords)
    if (j < 0 || j >= p) throw ConfigError("debias: coordinate index out of range");
}

}  // namespace

std::vector<DebiasedCoefficient> debias_sample_split(const TailSample& tail,
                                                     const std::vector<Index>& coords,
                                                     const DebiasOptions& options) {
  if (tail.size() < 2) throw DataError("debias_sample_split: tail too small to split");
  check_coords(coords, tail.dim());
  const FoldPlan plan = make_folds(tail.size(), 2, options.seed);
  const auto folds = plan.fold_indices();
  const std::vector<Index>& d1 = folds[0];  // projection half
  const std::vector<Index>& d2 = folds[1];  // estimation half
  if (d1.empty() || d2.empty()) throw DataError("debias_sample_split: empty half");

  const TailSample s1 = tail_subset(tail, d1);
  const TailSample s2 = tail_subset(tail, d2);
  const LassoFit fit = fit_lasso(s2, options.lasso);

  const WeightedGram gram_proj(s1, fit.theta);
  const CorrectionFold fold = default_fold(options, CorrectionFold::estimation);
  const TailSample& corr_sample = (fold == CorrectionFold::estimation) ? s2 : s1;
  const WeightedGram gram_corr(corr_sample, fit.theta);
  const Vector corr_mean = score(corr_sample, fit.theta);
  const auto n_corr = static_cast<double>(corr_sample.size());

  const ProjectionSolver solver(gram_proj, options.projection);
  std::vector<DebiasedCoefficient> out(coords.size());
  parallel_for(coords.size(), options.threads, [&](std::size_t t) {
    const Index j = coords[t];
    try {
      Vector target = Vector::Zero(tail.dim());
      target[j] = 1.0;
      const ProjectionResult proj = solver.solve(target);
      if (!proj.ok) {
        out[t] = failed_coefficient(j, proj.message);
        return;
      }
      const Vector& u = proj.direction.u;
      const double correction = u.dot(corr_mean);
      const double variance = u.dot(gram_corr.apply(u));
      out[t] = assemble_coefficient(j, {fit.theta[j]}, {correction}, {variance},
                                    {proj.direction.gamma1_used}, n_corr, options.level);
    } catch (const std::exception& e) {
      out[t] = failed_coefficient(j, e.what());
    }
  });
  return out;
}

CrossFitParts cross_fit_parts(const TailSample& tail, int K, const DebiasOptions& options) {
  CrossFitParts parts;
  parts.plan = make_folds(tail.size(), K, options.seed);
  const auto folds = parts.plan.fold_indices();
  const auto comps = parts.plan.complement_indices();
  const CorrectionFold fold = default_fold(options, CorrectionFold::projection);

  const auto n_folds = static_cast<std::size_t>(K);
  parts.fold_fits.resize(n_folds);
  parts.projection_samples.resize(n_folds);
  parts.correction_samples.resize(n_folds);
  parts.projection_grams.reserve(n_folds);
  parts.correction_grams.reserve(n_folds);
  parts.correction_score_means.resize(n_folds);

  for (std::size_t k = 0; k < n_folds; ++k) {
    if (folds[k].empty() || comps[k].empty())
      throw DataError("debias_cross_fit: empty fold after partition");
    const TailSample fit_sample = tail_subset(tail, folds[k]);
    parts.fold_fits[k] = fit_lasso(fit_sample, options.lasso);
    parts.projection_samples[k] = tail_subset(tail, comps[k]);
    parts.correction_samples[k] =
        (fold == CorrectionFold::projection) ? parts.projection_samples[k] : fit_sample;

    const Vector& theta_k = parts.fold_fits[k].theta;
    parts.projection_grams.emplace_back(parts.projection_samples[k], theta_k);
    parts.correction_grams.emplace_back(parts.correction_samples[k], theta_k);
    parts.correction_score_means[k] = score(parts.correction_samples[k], theta_k);
    parts.n_correction_mean += static_cast<double>(parts.correction_samples[k].size());
  }
  parts.n_correction_mean /= static_cast<double>(K);
  return parts;
}

std::vector<ProjectionSolver> make_projection_solvers(const CrossFitParts& parts,
                                                      const ProjectionConfig& config) {
  std::vector<ProjectionSolver> solvers;
  solvers.reserve(parts.projection_grams.size());
  for (const auto& gram : parts.projection_grams) solvers.emplace_back(gram, config);
  return solvers;
}

std::vector<DebiasedCoefficient> debias_coords_on_parts(
    const CrossFitParts& parts, const std::vector<ProjectionSolver>& solvers,
    const std::vector<Index>& coords, const DebiasOptions& options) {
  const auto n_folds = parts.projection_grams.size();
  const Index p = parts.projection_grams.front().dim();
  check_coords(coords, p);

  struct FoldPiece {
    bool ok = false;
    double correction = 0.0;
    double variance = 0.0;
    double gamma1 = 0.0;
    std::string message;
  };
  std::vector<FoldPiece> pieces(coords.size() * n_folds);

  parallel_for(pieces.size(), options.threads, [&](std::size_t t) {
    const std::size_t c = t / n_folds;
    const std::size_t k = t % n_folds;
    const Index j = coords[c];
    FoldPiece& piece = pieces[t];
    try {
      Vector target = Vector::Zero(p);
      target[j] = 1.0;
      const ProjectionResult proj = solvers[k].solve(target);
      if (!proj.ok) {
        piece.message = proj.message;
        return;
      }
      const Vector& u = proj.direction.u;
      piece.correction = u.dot(parts.correction_score_means[k]);
      piece.variance = u.dot(parts.correction_grams[k].apply(u));
      piece.gamma1 = proj.direction.gamma1_used;
      piece.ok = true;
    } catch (const std::exception& e) {
      piece.message = e.what();
    }
  });

  std::vector<DebiasedCoefficient> out(coords.size());
  for (std::size_t c = 0; c < coords.size(); ++c) {
    const Index j = coords[c];
    std::vector<double> theta_hats, corrections, variances, gammas;
    std::string failure;
    for (std::size_t k = 0; k < n_folds; ++k) {
      const FoldPiece& piece = pieces[c * n_folds + k];
      if (!piece.ok) {
        failure = piece.message.empty() ? "projection failed" : piece.message;
        break;
      }
      theta_hats.push_back(parts.fold_fits[k].theta[j]);
      corrections.push_back(piece.correction);
      variances.push_back(piece.variance);
      gammas.push_back(piece.gamma1);
    }
    out[c] = failure.empty()
                 ? assemble_coefficient(j, theta_hats, corrections, variances, gammas,
                                        parts.n_correction_mean, options.level)
                 : failed_coefficient(j, failure);
  }
  return out;
}

std::vector<DebiasedCoefficient> debias_cross_fit(const TailSample& tail, int K,
                                                  const std::vector<Index>& coords,
                                                  const DebiasOptions& options) {
  check_coords(coords, tail.dim());
  const CrossFitParts parts = cross_fit_parts(tail, K, options);
  const auto solvers = make_projection_solvers(parts, options.projection);
  return debias_coords_on_parts(parts, solvers, coords, options);
}

}  // namespace hdtir
