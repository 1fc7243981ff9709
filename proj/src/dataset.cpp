#include "hdtir/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hdtir {

DesignMatrix DesignMatrix::dense(Matrix x) {
  DesignMatrix m;
  m.sparse_ = false;
  m.n_ = x.rows();
  m.p_ = x.cols();
  m.dense_ = std::move(x);
  return m;
}

DesignMatrix DesignMatrix::sparse_binary(Index rows, Index cols,
                                         std::vector<std::vector<Index>> row_support) {
  if (static_cast<Index>(row_support.size()) != rows)
    throw DataError("sparse design: row_support size does not match row count");
  for (auto& support : row_support) {
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());
    if (!support.empty() && (support.front() < 0 || support.back() >= cols))
      throw DataError("sparse design: column index out of range");
  }
  DesignMatrix m;
  m.sparse_ = true;
  m.n_ = rows;
  m.p_ = cols;
  m.support_ = std::move(row_support);
  return m;
}

double DesignMatrix::coeff(Index i, Index j) const {
  if (!sparse_) return dense_(i, j);
  const auto& support = support_[static_cast<std::size_t>(i)];
  return std::binary_search(support.begin(), support.end(), j) ? 1.0 : 0.0;
}

Vector DesignMatrix::row(Index i) const {
  if (!sparse_) return dense_.row(i);
  Vector r = Vector::Zero(p_);
  for (Index j : support_[static_cast<std::size_t>(i)]) r[j] = 1.0;
  return r;
}

Matrix DesignMatrix::to_dense() const {
  if (!sparse_) return dense_;
  Matrix d = Matrix::Zero(n_, p_);
  for (Index i = 0; i < n_; ++i)
    for (Index j : support_[static_cast<std::size_t>(i)]) d(i, j) = 1.0;
  return d;
}

Vector DesignMatrix::col_sums() const {
  if (!sparse_) return dense_.colwise().sum();
  Vector s = Vector::Zero(p_);
  for (const auto& support : support_)
    for (Index j : support) s[j] += 1.0;
  return s;
}

void Dataset::validate() const {
  if (x.rows() != y.size())
    throw DataError("dataset: design row count does not match response length");
  if (!feature_names.empty() && static_cast<Index>(feature_names.size()) != x.cols())
    throw DataError("dataset: feature name count does not match design width");
}

double select_threshold(const Vector& y, double level) {
  if (y.size() == 0) throw DataError("select_threshold: empty response");
  if (!(level > 0.0 && level < 1.0))
    throw ConfigError("select_threshold: level must lie in (0,1)");
  std::vector<double> sorted(y.data(), y.data() + y.size());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  auto k = static_cast<std::size_t>(std::ceil(level * n));  // 1-based order statistic
  if (k < 1) k = 1;
  if (k > sorted.size()) k = sorted.size();
  return sorted[k - 1];
}

TailSample extract_tail(const Dataset& data, double omega) {
  data.validate();
  if (!(omega > 0.0)) throw ConfigError("extract_tail: omega must be positive");

  std::vector<Index> keep;
  for (Index i = 0; i < data.n(); ++i)
    if (data.y[i] > omega) keep.push_back(i);
  if (keep.empty())
    throw DataError("extract_tail: no observations exceed the threshold");

  TailSample tail;
  tail.omega = omega;
  tail.source_indices = keep;
  const auto n0 = static_cast<Index>(keep.size());
  tail.rows.resize(n0, data.p());
  tail.log_exceedances.resize(n0);
  for (Index r = 0; r < n0; ++r) {
    tail.rows.row(r) = data.x.row(keep[static_cast<std::size_t>(r)]).transpose();
    tail.log_exceedances[r] = std::log(data.y[keep[static_cast<std::size_t>(r)]] / omega);
  }
  return tail;
}

TailSample tail_subset(const TailSample& tail, const std::vector<Index>& rows) {
  TailSample sub;
  sub.omega = tail.omega;
  const auto n = static_cast<Index>(rows.size());
  const bool has_sources = static_cast<Index>(tail.source_indices.size()) == tail.size();
  sub.rows.resize(n, tail.dim());
  sub.log_exceedances.resize(n);
  sub.source_indices.reserve(rows.size());
  for (Index r = 0; r < n; ++r) {
    const Index src = rows[static_cast<std::size_t>(r)];
    if (src < 0 || src >= tail.size())
      throw DataError("tail_subset: row index out of range");
    sub.rows.row(r) = tail.rows.row(src);
    sub.log_exceedances[r] = tail.log_exceedances[src];
    sub.source_indices.push_back(
        has_sources ? tail.source_indices[static_cast<std::size_t>(src)] : src);
  }
  return sub;
}

LogLogData loglog_points(const Vector& y) {
  LogLogData out;
  std::vector<double> positive;
  positive.reserve(static_cast<std::size_t>(y.size()));
  for (Index i = 0; i < y.size(); ++i) {
    if (y[i] > 0.0)
      positive.push_back(y[i]);
    else
      ++out.dropped;
  }
  if (positive.empty())
    throw DataError("loglog_points: all responses are nonpositive");
  std::sort(positive.begin(), positive.end(), std::greater<>());
  out.log_y.reserve(positive.size());
  for (double v : positive) out.log_y.push_back(std::log(v));
  return out;
}

double loglog_slope(const LogLogData& data, double top_fraction) {
  if (!(top_fraction > 0.0 && top_fraction <= 1.0))
    throw ConfigError("loglog_slope: top_fraction must lie in (0,1]");
  auto m = static_cast<std::size_t>(
      std::ceil(top_fraction * static_cast<double>(data.log_y.size())));
  if (m < 2) m = std::min<std::size_t>(2, data.log_y.size());
  if (m < 2) throw DataError("loglog_slope: need at least two points");

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    const double lx = std::log(static_cast<double>(r + 1));
    const double ly = data.log_y[r];
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const auto n = static_cast<double>(m);
  const double denom = sxx - sx * sx / n;
  if (denom <= 0.0) throw DataError("loglog_slope: degenerate rank spread");
  return (sxy - sx * sy / n) / denom;
}

}  // namespace hdtir
