#pragma once

#include "hdtir/dataset.hpp"
#include "hdtir/debias.hpp"
#include "hdtir/types.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace hdtir {

enum class ThetaDesign { sparse, exponential };
enum class XDesign { gaussian, uniform, bernoulli };
enum class InferenceMethod { split, crossfit };

std::string to_string(ThetaDesign d);
std::string to_string(XDesign d);
std::string to_string(InferenceMethod m);

struct DgpConfig {
  ThetaDesign theta_design = ThetaDesign::exponential;
  XDesign x_design = XDesign::gaussian;
  Index n = 10000;
  Index p = 100;
  double cutoff_level = 0.95;
  std::uint64_t seed = 0;

  void validate() const;
};

// Sparse: 1.0, 0.9, ..., 0.1 then zeros (needs p >= 10).
// Exponential: entry j (0-based) is 0.5^j.
Vector gen_theta(ThetaDesign design, Index p);

// iid entries: Gaussian N(0, 0.1^2); Uniform(-0.1, 0.1); 0.1*Bernoulli(0.1).
Matrix gen_covariates(XDesign design, Index n, Index p, std::mt19937_64& rng);

// Pareto responses on the unit scale: y_i = (1 - u_i)^(-1/alpha_i) with
// alpha_i = exp(x_i'theta) and u_i ~ Uniform(0,1). All y >= 1.
Vector gen_response(const Matrix& x, const Vector& theta, std::mt19937_64& rng);

// splitmix64 of (seed XOR golden*(index+1)); documented so that parallel
// schedules cannot change per-replicate streams.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

struct ReplicateRecord {
  int rep = 0;
  double theta_tilde = 0.0;
  double se = 0.0;
  bool covered = false;
  bool failed = false;
  Index n0 = 0;
};

struct McSummary {
  int reps = 0;
  Index coord = 0;  // 0-based
  double bias = 0.0;
  double sd = 0.0;
  double rmse = 0.0;
  double coverage = 0.0;
  int failures = 0;
  bool degenerate = false;  // fewer than two successful replicates; sd reported as 0
  double theta_true = 0.0;
  double mean_n0 = 0.0;
};

struct McResult {
  McSummary summary;
  std::vector<ReplicateRecord> replicates;
};

// One replicate: generate data from a per-replicate stream, threshold at the
// cutoff level, debias the requested coordinate, record the CI hit. Failures
// are counted and excluded from the aggregates.
McResult run_monte_carlo(const DgpConfig& dgp, int reps, InferenceMethod method, int K,
                         const LassoConfig& lasso, const ProjectionConfig& projection,
                         double level, Index coord, int threads);

}  // namespace hdtir
