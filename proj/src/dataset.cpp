#include "skgp/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "skgp/rng.hpp"

namespace skgp {

namespace {

std::string csv_escape_free(const std::string& s) {
  if (s.find(',') != std::string::npos || s.find('\n') != std::string::npos) {
    throw std::invalid_argument("CSV writer does not support commas or newlines in names: '" +
                                s + "'");
  }
  return s;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

bool parse_double(const std::string& cell, double& out) {
  const std::string t = trim(cell);
  if (t.empty()) return false;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

}  // namespace

Dataset make_dataset(Eigen::MatrixXd features, Eigen::VectorXd response,
                     std::vector<std::string> feature_names, std::string response_name) {
  if (features.rows() != response.size()) {
    throw std::invalid_argument("make_dataset: feature rows (" +
                                std::to_string(features.rows()) + ") != response length (" +
                                std::to_string(response.size()) + ")");
  }
  if (!feature_names.empty() &&
      static_cast<Eigen::Index>(feature_names.size()) != features.cols()) {
    throw std::invalid_argument("make_dataset: feature_names size mismatch");
  }
  if (!features.allFinite() || !response.allFinite()) {
    throw std::invalid_argument("make_dataset: non-finite entries are not allowed");
  }
  return Dataset{std::move(features), std::move(response), std::move(feature_names),
                 std::move(response_name)};
}

Dataset load_csv(const std::string& path, const std::string& response_column) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("load_csv: cannot open file: " + path);
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("load_csv: empty file: " + path);
  }
  std::vector<std::string> header = split_line(line);
  for (auto& h : header) h = trim(h);
  const Eigen::Index ncols = static_cast<Eigen::Index>(header.size());
  if (ncols < 2) {
    throw std::runtime_error("load_csv: need at least one feature and one response column");
  }

  Eigen::Index response_idx = -1;
  {
    int idx = 0;
    const std::string rc = trim(response_column);
    auto [ptr, ec] = std::from_chars(rc.data(), rc.data() + rc.size(), idx);
    if (ec == std::errc() && ptr == rc.data() + rc.size()) {
      if (idx < 0 || idx >= ncols) {
        throw std::runtime_error("load_csv: response column index " + rc + " out of range");
      }
      response_idx = idx;
    } else {
      for (Eigen::Index c = 0; c < ncols; ++c) {
        if (header[c] == rc) {
          response_idx = c;
          break;
        }
      }
      if (response_idx < 0) {
        throw std::runtime_error("load_csv: response column '" + rc + "' not found in header");
      }
    }
  }

  std::vector<std::vector<double>> rows;
  Eigen::Index row_number = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row_number;
    std::vector<std::string> cells = split_line(line);
    if (static_cast<Eigen::Index>(cells.size()) != ncols) {
      throw std::runtime_error("load_csv: row " + std::to_string(row_number) + " has " +
                               std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(ncols));
    }
    std::vector<double> row(ncols);
    for (Eigen::Index c = 0; c < ncols; ++c) {
      double v = 0.0;
      if (!parse_double(cells[c], v)) {
        throw std::runtime_error("load_csv: non-numeric cell at row " +
                                 std::to_string(row_number) + ", column '" + header[c] + "'");
      }
      if (!std::isfinite(v)) {
        throw std::runtime_error("load_csv: non-finite value at row " +
                                 std::to_string(row_number) + ", column '" + header[c] + "'");
      }
      row[c] = v;
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw std::runtime_error("load_csv: no data rows in " + path);
  }

  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index p = ncols - 1;
  Eigen::MatrixXd X(n, p);
  Eigen::VectorXd y(n);
  std::vector<std::string> names;
  names.reserve(p);
  for (Eigen::Index c = 0; c < ncols; ++c) {
    if (c != response_idx) names.push_back(header[c]);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index fc = 0;
    for (Eigen::Index c = 0; c < ncols; ++c) {
      if (c == response_idx) {
        y(i) = rows[i][c];
      } else {
        X(i, fc++) = rows[i][c];
      }
    }
  }
  Dataset d;
  d.features = std::move(X);
  d.response = std::move(y);
  d.feature_names = std::move(names);
  d.response_name = header[response_idx];
  return d;
}

void write_csv(const Dataset& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_csv: cannot open file for writing: " + path);
  }
  const Eigen::Index n = d.n();
  const Eigen::Index p = d.p();
  for (Eigen::Index c = 0; c < p; ++c) {
    const std::string name =
        d.feature_names.empty() ? ("x" + std::to_string(c + 1)) : d.feature_names[c];
    out << csv_escape_free(name) << ',';
  }
  out << csv_escape_free(d.response_name) << '\n';
  char buf[64];
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index c = 0; c < p; ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", d.features(i, c));
      out << buf << ',';
    }
    std::snprintf(buf, sizeof(buf), "%.17g", d.response(i));
    out << buf << '\n';
  }
  if (!out) {
    throw std::runtime_error("write_csv: write failed: " + path);
  }
}

void to_json(nlohmann::json& j, const StandardizationParams& s) {
  j = nlohmann::json{
      {"feature_means", std::vector<double>(s.feature_means.begin(), s.feature_means.end())},
      {"feature_sds", std::vector<double>(s.feature_sds.begin(), s.feature_sds.end())},
      {"constant_feature", s.constant_feature},
      {"response_mean", s.response_mean},
      {"response_sd", s.response_sd},
      {"response_constant", s.response_constant}};
}

void from_json(const nlohmann::json& j, StandardizationParams& s) {
  const auto means = j.at("feature_means").get<std::vector<double>>();
  const auto sds = j.at("feature_sds").get<std::vector<double>>();
  s.feature_means = Eigen::Map<const Eigen::VectorXd>(means.data(), means.size());
  s.feature_sds = Eigen::Map<const Eigen::VectorXd>(sds.data(), sds.size());
  j.at("constant_feature").get_to(s.constant_feature);
  j.at("response_mean").get_to(s.response_mean);
  j.at("response_sd").get_to(s.response_sd);
  j.at("response_constant").get_to(s.response_constant);
}

std::pair<Dataset, StandardizationParams> standardize(const Dataset& d) {
  const Eigen::Index n = d.n();
  const Eigen::Index p = d.p();
  if (n < 2) {
    throw std::invalid_argument("standardize: need at least 2 rows");
  }
  StandardizationParams s;
  s.feature_means = d.features.colwise().mean();
  s.feature_sds.resize(p);
  s.constant_feature.assign(static_cast<std::size_t>(p), 0);
  Dataset out = d;
  for (Eigen::Index c = 0; c < p; ++c) {
    out.features.col(c).array() -= s.feature_means(c);
    const double ss = out.features.col(c).squaredNorm();
    double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (sd <= 0.0) {
      sd = 1.0;
      s.constant_feature[static_cast<std::size_t>(c)] = 1;
    }
    s.feature_sds(c) = sd;
    out.features.col(c) /= sd;
  }
  s.response_mean = d.response.mean();
  out.response.array() -= s.response_mean;
  double rsd = std::sqrt(out.response.squaredNorm() / static_cast<double>(n - 1));
  if (rsd <= 0.0) {
    rsd = 1.0;
    s.response_constant = true;
  }
  s.response_sd = rsd;
  out.response /= rsd;
  return {std::move(out), std::move(s)};
}

Eigen::MatrixXd apply_feature_standardization(const Eigen::MatrixXd& X,
                                              const StandardizationParams& s) {
  if (X.cols() != s.feature_means.size()) {
    throw std::invalid_argument("apply_feature_standardization: column count mismatch");
  }
  Eigen::MatrixXd out = X;
  out.rowwise() -= s.feature_means.transpose();
  out.array().rowwise() /= s.feature_sds.transpose().array();
  return out;
}

Eigen::VectorXd apply_response_standardization(const Eigen::VectorXd& y,
                                               const StandardizationParams& s) {
  return (y.array() - s.response_mean) / s.response_sd;
}

Eigen::VectorXd destandardize_response(const Eigen::VectorXd& y,
                                       const StandardizationParams& s) {
  return y.array() * s.response_sd + s.response_mean;
}

Dataset destandardize(const Dataset& d, const StandardizationParams& s) {
  if (d.p() != s.feature_means.size()) {
    throw std::invalid_argument("destandardize: column count mismatch");
  }
  Dataset out = d;
  out.features.array().rowwise() *= s.feature_sds.transpose().array();
  out.features.rowwise() += s.feature_means.transpose();
  out.response = destandardize_response(d.response, s);
  return out;
}

Dataset concat_rows(const Dataset& a, const Dataset& b) {
  if (a.p() != b.p()) {
    throw std::invalid_argument("concat_rows: column count mismatch");
  }
  Dataset out = a;
  out.features.conservativeResize(a.n() + b.n(), a.p());
  out.features.bottomRows(b.n()) = b.features;
  out.response.conservativeResize(a.n() + b.n());
  out.response.tail(b.n()) = b.response;
  return out;
}

std::vector<Eigen::Index> FoldPlan::fold_indices(int s) const {
  std::vector<Eigen::Index> idx;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] == s) idx.push_back(static_cast<Eigen::Index>(i));
  }
  return idx;
}

std::vector<Eigen::Index> FoldPlan::complement_indices(int s) const {
  std::vector<Eigen::Index> idx;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] != s) idx.push_back(static_cast<Eigen::Index>(i));
  }
  return idx;
}

FoldPlan make_folds(Eigen::Index n, int S, std::uint64_t seed) {
  if (S < 2) {
    throw std::invalid_argument("make_folds: need at least 2 folds");
  }
  if (static_cast<Eigen::Index>(S) > n) {
    throw std::invalid_argument("make_folds: fold count exceeds sample count");
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  rng::Stream stream(seed, /*stream=*/0);
  for (Eigen::Index i = n - 1; i > 0; --i) {
    const auto j = static_cast<Eigen::Index>(stream.below(static_cast<std::uint64_t>(i) + 1));
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  }
  FoldPlan plan;
  plan.S = S;
  plan.assignments.assign(static_cast<std::size_t>(n), 0);
  const Eigen::Index base = n / S;
  const Eigen::Index remainder = n % S;
  Eigen::Index pos = 0;
  for (int s = 1; s <= S; ++s) {
    const Eigen::Index size = base + (s <= remainder ? 1 : 0);
    for (Eigen::Index k = 0; k < size; ++k) {
      plan.assignments[static_cast<std::size_t>(order[static_cast<std::size_t>(pos++)])] = s;
    }
  }
  return plan;
}

}  // namespace skgp
