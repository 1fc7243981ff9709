#include "hdtir/io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace hdtir {

namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

double parse_double(const std::string& field, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(field, &used);
    if (used != field.size()) throw std::invalid_argument(field);
    return v;
  } catch (const std::exception&) {
    throw DataError("cannot parse number '" + field + "' in " + where);
  }
}

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\r\n") == std::string::npos) return value;
  std::string quoted = "\"";
  for (char c : value) {
    quoted.push_back(c);
    if (c == '"') quoted.push_back('"');
  }
  quoted.push_back('"');
  return quoted;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool row_started = false;
  std::size_t i = 0;
  auto end_field = [&]() {
    row.push_back(std::move(field));
    field.clear();
  };
  auto end_row = [&]() {
    end_field();
    rows.push_back(std::move(row));
    row.clear();
    row_started = false;
  };
  while (i < text.size()) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"' && field.empty()) {
      in_quotes = true;
      row_started = true;
    } else if (c == ',') {
      end_field();
      row_started = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (row_started || !field.empty()) end_row();
    } else {
      field.push_back(c);
      row_started = true;
    }
    ++i;
  }
  if (in_quotes) throw DataError("unterminated quote in " + path.string());
  if (row_started || !field.empty()) end_row();
  return rows;
}

Dataset dataset_from_csv(const std::filesystem::path& path, const std::string& response_col) {
  const auto rows = read_csv(path);
  if (rows.size() < 2) throw DataError("dataset CSV needs a header and at least one row");
  const auto& header = rows.front();
  const auto p_total = header.size();

  std::size_t response_idx = p_total;
  for (std::size_t j = 0; j < p_total; ++j)
    if (header[j] == response_col) response_idx = j;
  if (response_idx == p_total) {
    int idx = 0;
    const auto res = std::from_chars(response_col.data(),
                                     response_col.data() + response_col.size(), idx);
    if (res.ec == std::errc() && res.ptr == response_col.data() + response_col.size() &&
        idx >= 1 && static_cast<std::size_t>(idx) <= p_total)
      response_idx = static_cast<std::size_t>(idx - 1);
  }
  if (response_idx == p_total)
    throw DataError("response column '" + response_col + "' not found in " + path.string());

  const auto n = static_cast<Index>(rows.size() - 1);
  const auto p = static_cast<Index>(p_total - 1);
  if (p < 1) throw DataError("dataset CSV has no feature columns");
  Vector y(n);
  Matrix x(n, p);
  std::vector<std::string> names;
  for (std::size_t j = 0; j < p_total; ++j)
    if (j != response_idx) names.push_back(header[j]);

  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != p_total)
      throw DataError("row " + std::to_string(r + 1) + " of " + path.string() +
                      " has " + std::to_string(rows[r].size()) + " fields, expected " +
                      std::to_string(p_total));
    const std::string where = path.string() + " row " + std::to_string(r + 1);
    Index c = 0;
    for (std::size_t j = 0; j < p_total; ++j) {
      const double v = parse_double(rows[r][j], where);
      if (j == response_idx)
        y[static_cast<Index>(r - 1)] = v;
      else
        x(static_cast<Index>(r - 1), c++) = v;
    }
  }
  Dataset data{std::move(y), DesignMatrix::dense(std::move(x)), std::move(names)};
  data.validate();
  return data;
}

Dataset dataset_from_triplets(const std::filesystem::path& design_path,
                              const std::filesystem::path& response_path,
                              const std::filesystem::path& vocab_path) {
  std::ifstream in(design_path);
  if (!in) throw DataError("cannot open " + design_path.string());
  std::string line;
  Index n = -1, p = -1;
  std::vector<std::vector<Index>> support;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream fields(line);
    if (n < 0) {
      if (fields >> n >> p) {
        if (n < 0 || p < 1) throw DataError("triplet header has invalid sizes");
        support.resize(static_cast<std::size_t>(n));
      } else if (!line.empty() && line.find_first_not_of(" \t\r") != std::string::npos) {
        throw DataError("triplet file must start with 'n p' header");
      }
      continue;
    }
    Index r, c;
    double v;
    if (!(fields >> r >> c >> v)) {
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        throw DataError("malformed triplet at line " + std::to_string(line_no) + " of " +
                        design_path.string());
      continue;
    }
    if (r < 0 || r >= n || c < 0 || c >= p)
      throw DataError("triplet index out of range at line " + std::to_string(line_no));
    if (v != 1.0)
      throw DataError("binary triplet value must be 1 at line " + std::to_string(line_no));
    support[static_cast<std::size_t>(r)].push_back(c);
  }
  if (n < 0) throw DataError("triplet file " + design_path.string() + " is empty");

  std::ifstream yin(response_path);
  if (!yin) throw DataError("cannot open " + response_path.string());
  std::vector<double> yv;
  while (std::getline(yin, line)) {
    if (line.empty() || line[0] == '#') continue;
    yv.push_back(parse_double(line, response_path.string()));
  }
  if (static_cast<Index>(yv.size()) != n)
    throw DataError("response length does not match design row count");

  Dataset data;
  data.y = Eigen::Map<Vector>(yv.data(), static_cast<Index>(yv.size()));
  data.x = DesignMatrix::sparse_binary(n, p, std::move(support));
  if (!vocab_path.empty()) {
    data.feature_names = read_word_list(vocab_path);
    if (static_cast<Index>(data.feature_names.size()) != p)
      throw DataError("vocabulary length does not match design width");
  }
  data.validate();
  return data;
}

Corpus corpus_from_csv(const std::filesystem::path& path) {
  const auto rows = read_csv(path);
  if (rows.empty()) throw DataError("corpus CSV " + path.string() + " is empty");
  const auto& header = rows.front();
  std::size_t id_col = header.size(), text_col = header.size(), likes_col = header.size();
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == "id") id_col = j;
    if (header[j] == "text") text_col = j;
    if (header[j] == "likes") likes_col = j;
  }
  if (id_col == header.size() || text_col == header.size() || likes_col == header.size())
    throw DataError("corpus CSV must have id, text and likes columns");

  Corpus corpus;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != header.size())
      throw DataError("corpus row " + std::to_string(r + 1) + " has wrong field count");
    Post post;
    post.id = rows[r][id_col];
    post.text = rows[r][text_col];
    const double likes =
        parse_double(rows[r][likes_col], path.string() + " row " + std::to_string(r + 1));
    if (likes < 0 || likes != std::floor(likes))
      throw DataError("likes must be a nonnegative integer at row " + std::to_string(r + 1));
    post.likes = static_cast<std::int64_t>(likes);
    corpus.posts.push_back(std::move(post));
  }
  corpus.validate();
  return corpus;
}

std::vector<std::string> read_word_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    words.push_back(line);
  }
  return words;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << content;
}

void write_loglog_csv(const std::filesystem::path& path, const LogLogData& data) {
  std::ostringstream out;
  out << "rank,log_y\n";
  for (std::size_t r = 0; r < data.log_y.size(); ++r)
    out << (r + 1) << ',' << format_double(data.log_y[r]) << '\n';
  write_text_file(path, out.str());
}

void write_word_bank_csv(const std::filesystem::path& path, const WordBank& bank) {
  std::vector<const WordBank::value_type*> entries;
  entries.reserve(bank.size());
  for (const auto& e : bank) entries.push_back(&e);
  std::sort(entries.begin(), entries.end(), [](const auto* a, const auto* b) {
    if (a->second.doc_count != b->second.doc_count)
      return a->second.doc_count > b->second.doc_count;
    if (a->second.count != b->second.count) return a->second.count > b->second.count;
    return a->first < b->first;
  });
  std::ostringstream out;
  out << "word,count,doc_count\n";
  for (const auto* e : entries)
    out << csv_field(e->first) << ',' << e->second.count << ',' << e->second.doc_count << '\n';
  write_text_file(path, out.str());
}

void write_word_list(const std::filesystem::path& path, const std::vector<std::string>& words) {
  std::ostringstream out;
  for (const auto& w : words) out << w << '\n';
  write_text_file(path, out.str());
}

void write_design_triplets(const std::filesystem::path& path, const DesignMatrix& x) {
  std::ostringstream out;
  out << x.rows() << ' ' << x.cols() << '\n';
  if (x.is_sparse()) {
    const auto& support = x.row_support();
    for (std::size_t i = 0; i < support.size(); ++i)
      for (Index j : support[i]) out << i << ' ' << j << " 1\n";
  } else {
    for (Index i = 0; i < x.rows(); ++i)
      for (Index j = 0; j < x.cols(); ++j)
        if (x.coeff(i, j) != 0.0) {
          if (x.coeff(i, j) != 1.0)
            throw DataError("triplet export requires a binary design");
          out << i << ' ' << j << " 1\n";
        }
  }
  write_text_file(path, out.str());
}

void write_response(const std::filesystem::path& path, const Vector& y) {
  std::ostringstream out;
  for (Index i = 0; i < y.size(); ++i) out << format_double(y[i]) << '\n';
  write_text_file(path, out.str());
}

void write_inference_csv(const std::filesystem::path& path,
                         const std::vector<DebiasedCoefficient>& coefficients,
                         const std::vector<std::string>& feature_names,
                         const std::string& method) {
  std::ostringstream out;
  out << "coord,name,theta_hat,theta_tilde,se,z,ci_low,ci_high,method,gamma1_used,failed\n";
  for (const auto& c : coefficients) {
    const auto j = static_cast<std::size_t>(c.coord);
    const std::string name = j < feature_names.size() ? feature_names[j] : "";
    out << (c.coord + 1) << ',' << csv_field(name) << ',' << format_double(c.theta_hat)
        << ',' << format_double(c.theta_tilde) << ',' << format_double(c.se) << ','
        << format_double(c.z) << ',' << format_double(c.ci_low) << ','
        << format_double(c.ci_high) << ',' << method << ',' << format_double(c.gamma1_used)
        << ',' << (c.failed ? 1 : 0) << '\n';
  }
  write_text_file(path, out.str());
}

std::string lasso_fit_json(const LassoFit& fit) {
  json j;
  j["theta"] = std::vector<double>(fit.theta.data(), fit.theta.data() + fit.theta.size());
  j["lambda"] = fit.lambda;
  j["objective"] = fit.objective;
  j["iterations"] = fit.iterations;
  j["converged"] = fit.converged;
  j["kkt_residual"] = fit.kkt_residual;
  std::vector<Index> support;
  for (Index s : fit.support) support.push_back(s + 1);  // 1-based, as in the tables
  j["support"] = support;
  return j.dump(2) + "\n";
}

std::string quantile_json(const QuantileEstimate& e) {
  json j;
  j["tau"] = e.tau;
  j["x"] = std::vector<double>(e.x.data(), e.x.data() + e.x.size());
  j["q_hat"] = e.q_hat;
  j["se"] = e.se;
  j["ci"] = {e.ci_low, e.ci_high};
  j["n0"] = e.n0;
  j["K"] = e.K;
  j["method"] = "crossfit";
  j["ci_truncated"] = e.ci_truncated;
  return j.dump(2) + "\n";
}

void write_replicates_csv(const std::filesystem::path& path,
                          const std::vector<ReplicateRecord>& records) {
  std::ostringstream out;
  out << "rep,theta_tilde,se,covered,failed\n";
  for (const auto& r : records)
    out << r.rep << ',' << format_double(r.theta_tilde) << ',' << format_double(r.se)
        << ',' << (r.covered ? 1 : 0) << ',' << (r.failed ? 1 : 0) << '\n';
  write_text_file(path, out.str());
}

void write_summary_csv(const std::filesystem::path& path, const McSummary& summary,
                       const DgpConfig& dgp) {
  std::ostringstream out;
  out << "n0,p,theta_design,x_design,bias,sd,rmse,coverage,failures,degenerate\n";
  out << format_double(summary.mean_n0) << ',' << dgp.p << ','
      << to_string(dgp.theta_design) << ',' << to_string(dgp.x_design) << ','
      << format_double(summary.bias) << ',' << format_double(summary.sd) << ','
      << format_double(summary.rmse) << ',' << format_double(summary.coverage) << ','
      << summary.failures << ',' << (summary.degenerate ? 1 : 0) << '\n';
  write_text_file(path, out.str());
}

}  // namespace hdtir
