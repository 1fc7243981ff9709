#pragma once

#include "hdtir/dataset.hpp"
#include "hdtir/debias.hpp"
#include "hdtir/lasso.hpp"
#include "hdtir/quantile.hpp"
#include "hdtir/simulate.hpp"
#include "hdtir/text_pipeline.hpp"
#include "hdtir/types.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace hdtir {

// Shortest round-trip decimal form (stable across runs).
std::string format_double(double v);

// RFC 4180: quoted fields may hold commas, doubled quotes and newlines.
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path);

// One header row; the response column is picked by name, or by 1-based
// position when `response_col` parses as an integer. Remaining columns are
// numeric features.
Dataset dataset_from_csv(const std::filesystem::path& path, const std::string& response_col);

// Sparse binary design: header line "n p", then "row col value" triplets
// (0-based, value 1, '#' comments allowed). The response file holds one
// number per line; the optional vocabulary file one feature name per line.
Dataset dataset_from_triplets(const std::filesystem::path& design_path,
                              const std::filesystem::path& response_path,
                              const std::filesystem::path& vocab_path = {});

// Corpus CSV requires columns id, text, likes.
Corpus corpus_from_csv(const std::filesystem::path& path);

std::vector<std::string> read_word_list(const std::filesystem::path& path);

void write_loglog_csv(const std::filesystem::path& path, const LogLogData& data);
void write_word_bank_csv(const std::filesystem::path& path, const WordBank& bank);
void write_word_list(const std::filesystem::path& path, const std::vector<std::string>& words);
void write_design_triplets(const std::filesystem::path& path, const DesignMatrix& x);
void write_response(const std::filesystem::path& path, const Vector& y);

// coord, name, theta_hat, theta_tilde, se, z, ci_low, ci_high, method,
// gamma1_used, failed -- one row per coordinate, coord printed 1-based.
void write_inference_csv(const std::filesystem::path& path,
                         const std::vector<DebiasedCoefficient>& coefficients,
                         const std::vector<std::string>& feature_names,
                         const std::string& method);

std::string lasso_fit_json(const LassoFit& fit);
std::string quantile_json(const QuantileEstimate& estimate);

void write_replicates_csv(const std::filesystem::path& path,
                          const std::vector<ReplicateRecord>& records);
void write_summary_csv(const std::filesystem::path& path, const McSummary& summary,
                       const DgpConfig& dgp);

void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace hdtir
