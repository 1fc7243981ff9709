#pragma once

#include "hdtir/types.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hdtir {

// Design matrix with two storage forms: dense reals, or sparse rows of a
// binary indicator matrix (only the columns equal to 1 are stored).
class DesignMatrix {
 public:
  DesignMatrix() = default;

  static DesignMatrix dense(Matrix x);
  // row_support[i] holds the sorted column indices that are 1 in row i.
  static DesignMatrix sparse_binary(Index rows, Index cols,
                                    std::vector<std::vector<Index>> row_support);

  Index rows() const { return n_; }
  Index cols() const { return p_; }
  bool is_sparse() const { return sparse_; }

  double coeff(Index i, Index j) const;
  Vector row(Index i) const;
  Matrix to_dense() const;
  Vector col_sums() const;

  const std::vector<std::vector<Index>>& row_support() const { return support_; }

 private:
  bool sparse_ = false;
  Index n_ = 0;
  Index p_ = 0;
  Matrix dense_;
  std::vector<std::vector<Index>> support_;
};

struct Dataset {
  Vector y;  // response, nonnegative; tail operations require positivity
  DesignMatrix x;
  std::vector<std::string> feature_names;  // empty, or one name per column

  Index n() const { return y.size(); }
  Index p() const { return x.cols(); }
  void validate() const;  // throws DataError on row-count mismatch
};

// Exceedance subsample above a threshold omega. log_exceedances holds
// m_i = log(y_i / omega) for the rows with y_i > omega, in original order.
struct TailSample {
  double omega = 0.0;
  Matrix rows;              // n0 x p covariates of the exceedances
  Vector log_exceedances;   // all entries strictly positive
  std::vector<Index> source_indices;

  Index size() const { return log_exceedances.size(); }
  Index dim() const { return rows.cols(); }
};

// Order statistic y_(ceil(level * n)) of the ascending sort (type-1 empirical
// quantile, 1-based index).
double select_threshold(const Vector& y, double level);

// Keeps rows with y_i > omega strictly; throws DataError when no row exceeds.
TailSample extract_tail(const Dataset& data, double omega);

// Subsample of a tail by row positions (0-based into the tail, not the
// original dataset).
TailSample tail_subset(const TailSample& tail, const std::vector<Index>& rows);

// Descending-sorted log responses for the rank/log plot. Entry r (0-based)
// is log of the (r+1)-th largest positive response.
struct LogLogData {
  std::vector<double> log_y;  // nonincreasing
  Index dropped = 0;          // count of nonpositive entries removed
};

LogLogData loglog_points(const Vector& y);

// Least-squares slope of log_y on log(rank) over the top `top_fraction`
// of ranks (at least two points).
double loglog_slope(const LogLogData& data, double top_fraction);

}  // namespace hdtir
