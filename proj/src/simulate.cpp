#include "hdtir/simulate.hpp"

#include "hdtir/likelihood.hpp"
#include "hdtir/parallel.hpp"

#include <cmath>

namespace hdtir {

std::string to_string(ThetaDesign d) {
  return d == ThetaDesign::sparse ? "sparse" : "exponential";
}

std::string to_string(XDesign d) {
  switch (d) {
    case XDesign::gaussian: return "gaussian";
    case XDesign::uniform: return "uniform";
    default: return "bernoulli";
  }
}

std::string to_string(InferenceMethod m) {
  return m == InferenceMethod::split ? "split" : "crossfit";
}

void DgpConfig::validate() const {
  if (n < 10) throw ConfigError("dgp: n must be at least 10");
  if (p < 2) throw ConfigError("dgp: p must be at least 2");
  if (!(cutoff_level > 0.0 && cutoff_level < 1.0))
    throw ConfigError("dgp: cutoff_level must lie in (0,1)");
}

Vector gen_theta(ThetaDesign design, Index p) {
  if (design == ThetaDesign::sparse && p < 10)
    throw ConfigError("gen_theta: sparse design needs p >= 10 for the full ramp");
  Vector theta = Vector::Zero(p);
  if (design == ThetaDesign::sparse) {
    for (Index j = 0; j < 10; ++j) theta[j] = 1.0 - 0.1 * static_cast<double>(j);
  } else {
    for (Index j = 0; j < p; ++j) theta[j] = std::pow(0.5, static_cast<double>(j));
  }
  return theta;
}

Matrix gen_covariates(XDesign design, Index n, Index p, std::mt19937_64& rng) {
  Matrix x(n, p);
  switch (design) {
    case XDesign::gaussian: {
      std::normal_distribution<double> normal(0.0, 0.1);
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < p; ++j) x(i, j) = normal(rng);
      break;
    }
    case XDesign::uniform: {
      std::uniform_real_distribution<double> uniform(-0.1, 0.1);
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < p; ++j) x(i, j) = uniform(rng);
      break;
    }
    case XDesign::bernoulli: {
      std::bernoulli_distribution bernoulli(0.1);
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < p; ++j) x(i, j) = bernoulli(rng) ? 0.1 : 0.0;
      break;
    }
  }
  return x;
}

Vector gen_response(const Matrix& x, const Vector& theta, std::mt19937_64& rng) {
  if (x.cols() != theta.size())
    throw DataError("gen_response: theta length does not match design width");
  const Vector eta = x * theta;
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  Vector y(x.rows());
  for (Index i = 0; i < x.rows(); ++i) {
    if (std::abs(eta[i]) > kLinkCap)
      throw NumericError("gen_response: linear predictor exceeds the link cap");
    const double alpha = std::exp(eta[i]);
    y[i] = std::pow(1.0 - uniform(rng), -1.0 / alpha);
  }
  return y;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed ^ (0x9E3779B97F4A7C15ULL * (index + 1));
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

McResult run_monte_carlo(const DgpConfig& dgp, int reps, InferenceMethod method, int K,
                         const LassoConfig& lasso, const ProjectionConfig& projection,
                         double level, Index coord, int threads) {
  dgp.validate();
  if (reps < 1) throw ConfigError("run_monte_carlo: reps must be at least 1");
  const Vector theta0 = gen_theta(dgp.theta_design, dgp.p);
  if (coord < 0 || coord >= dgp.p)
    throw ConfigError("run_monte_carlo: coordinate out of range");

  McResult result;
  result.replicates.assign(static_cast<std::size_t>(reps), ReplicateRecord{});

  parallel_for(static_cast<std::size_t>(reps), threads, [&](std::size_t r) {
    ReplicateRecord& rec = result.replicates[r];
    rec.rep = static_cast<int>(r);
    try {
      std::mt19937_64 data_rng(mix_seed(dgp.seed, 2 * r));
      const Matrix x = gen_covariates(dgp.x_design, dgp.n, dgp.p, data_rng);
      const Vector y = gen_response(x, theta0, data_rng);
      Dataset data{y, DesignMatrix::dense(x), {}};
      const double omega = select_threshold(data.y, dgp.cutoff_level);
      const TailSample tail = extract_tail(data, omega);
      rec.n0 = tail.size();

      DebiasOptions options;
      options.lasso = lasso;
      options.projection = projection;
      options.level = level;
      options.seed = mix_seed(dgp.seed, 2 * r + 1);
      options.threads = 1;  // replicates own the parallelism
      const auto coefficients =
          method == InferenceMethod::split
              ? debias_sample_split(tail, {coord}, options)
              : debias_cross_fit(tail, K, {coord}, options);
      const DebiasedCoefficient& c = coefficients.front();
      if (c.failed) {
        rec.failed = true;
        return;
      }
      rec.theta_tilde = c.theta_tilde;
      rec.se = c.se;
      rec.covered = c.ci_low <= theta0[coord] && theta0[coord] <= c.ci_high;
    } catch (const std::exception&) {
      rec.failed = true;
    }
  });

  McSummary& s = result.summary;
  s.reps = reps;
  s.coord = coord;
  s.theta_true = theta0[coord];
  double sum = 0.0, n0_sum = 0.0;
  int ok = 0, covered = 0;
  for (const auto& rec : result.replicates) {
    n0_sum += static_cast<double>(rec.n0);
    if (rec.failed) {
      ++s.failures;
      continue;
    }
    sum += rec.theta_tilde;
    covered += rec.covered ? 1 : 0;
    ++ok;
  }
  if (ok == 0) throw NumericError("run_monte_carlo: all replicates failed");
  s.mean_n0 = n0_sum / static_cast<double>(reps);
  const double mean = sum / static_cast<double>(ok);
  s.bias = mean - theta0[coord];
  if (ok > 1) {
    double ss = 0.0;
    for (const auto& rec : result.replicates)
      if (!rec.failed) ss += (rec.theta_tilde - mean) * (rec.theta_tilde - mean);
    s.sd = std::sqrt(ss / static_cast<double>(ok - 1));
  } else {
    s.sd = 0.0;
    s.degenerate = true;
  }
  s.rmse = std::sqrt(s.bias * s.bias + s.sd * s.sd);
  s.coverage = static_cast<double>(covered) / static_cast<double>(ok);
  return result;
}

}  // namespace hdtir
