#pragma once

#include "hdtir/dataset.hpp"
#include "hdtir/lasso.hpp"
#include "hdtir/projection.hpp"
#include "hdtir/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hdtir {

// Which subsample the bias-correction average and the variance Gram run
// over: the one the lasso was fit on, or the one the projection direction
// was solved on. Defaults differ by method (see DebiasOptions).
enum class CorrectionFold { estimation, projection };

struct DebiasOptions {
  LassoConfig lasso;
  ProjectionConfig projection;
  std::uint64_t seed = 0;
  double level = 0.95;
  // When unset: sample splitting corrects on the estimation half (the
  // paper's displayed sums), cross-fitting on the projection complement.
  std::optional<CorrectionFold> correction_fold;
  int threads = 1;
};

struct DebiasedCoefficient {
  Index coord = 0;  // 0-based coordinate index
  double theta_hat = 0.0;
  double theta_tilde = 0.0;
  double variance = 0.0;
  double se = 0.0;
  double z = 0.0;  // theta_tilde / se, the test of theta_j = 0
  double ci_low = 0.0;
  double ci_high = 0.0;
  double gamma1_used = 0.0;
  double n_inference = 0.0;  // se^2 * n_inference == variance
  bool failed = false;
  std::string message;
};

struct FoldPlan {
  int K = 0;
  std::vector<int> assignments;  // fold label per tail row
  std::uint64_t seed = 0;

  std::vector<std::vector<Index>> fold_indices() const;
  std::vector<std::vector<Index>> complement_indices() const;
};

// Uniformly random partition into K folds whose sizes differ by at most one,
// reproducible from the seed.
FoldPlan make_folds(Index n0, int K, std::uint64_t seed);

// Half-split debiased estimator: theta_hat from one half, projection
// directions from the other, per-coordinate correction and variance per the
// correction-fold setting.
std::vector<DebiasedCoefficient> debias_sample_split(const TailSample& tail,
                                                     const std::vector<Index>& coords,
                                                     const DebiasOptions& options);

// Per-fold machinery shared by the coefficient and quantile paths. Fold k
// fits the lasso on I_k and solves projections on the complement.
struct CrossFitParts {
  FoldPlan plan;
  std::vector<LassoFit> fold_fits;
  std::vector<TailSample> projection_samples;   // complements I_k^c
  std::vector<TailSample> correction_samples;
  std::vector<WeightedGram> projection_grams;   // at theta_hat_k
  std::vector<WeightedGram> correction_grams;   // at theta_hat_k
  std::vector<Vector> correction_score_means;   // score summand means
  double n_correction_mean = 0.0;
};

CrossFitParts cross_fit_parts(const TailSample& tail, int K, const DebiasOptions& options);

std::vector<ProjectionSolver> make_projection_solvers(const CrossFitParts& parts,
                                                      const ProjectionConfig& config);

std::vector<DebiasedCoefficient> debias_coords_on_parts(
    const CrossFitParts& parts, const std::vector<ProjectionSolver>& solvers,
    const std::vector<Index>& coords, const DebiasOptions& options);

// K-fold cross-fit debiased estimator: fold-averaged corrections and
// variance quadratic forms.
std::vector<DebiasedCoefficient> debias_cross_fit(const TailSample& tail, int K,
                                                  const std::vector<Index>& coords,
                                                  const DebiasOptions& options);

// theta_tilde -/+ z_level * sqrt(variance / n_eff).
std::pair<double, double> confidence_interval(double theta_tilde, double variance,
                                              double n_eff, double level);

}  // namespace hdtir
