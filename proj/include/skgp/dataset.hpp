#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace skgp {

// Immutable after construction; safe to share read-only across workers.
struct Dataset {
  Eigen::MatrixXd features;                // n x p
  Eigen::VectorXd response;                // n
  std::vector<std::string> feature_names;  // empty or size p
  std::string response_name = "y";

  Eigen::Index n() const { return features.rows(); }
  Eigen::Index p() const { return features.cols(); }
};

// Validates shape agreement and rejects non-finite entries.
Dataset make_dataset(Eigen::MatrixXd features, Eigen::VectorXd response,
                     std::vector<std::string> feature_names = {},
                     std::string response_name = "y");

// CSV ingestion: comma-delimited, header row required, decimal-point
// floats, UTF-8. `response_column` is a header name, or a 0-based column
// index if it parses as an integer.
Dataset load_csv(const std::string& path, const std::string& response_column);

// Writer emits 17 significant digits so load_csv(write_csv(d)) round-trips
// bit-exactly.
void write_csv(const Dataset& d, const std::string& path);

struct StandardizationParams {
  Eigen::VectorXd feature_means;       // p
  Eigen::VectorXd feature_sds;         // p, strictly positive
  std::vector<std::uint8_t> constant_feature;  // p, 1 where sd was degenerate
  double response_mean = 0.0;
  double response_sd = 1.0;
  bool response_constant = false;
};

void to_json(nlohmann::json& j, const StandardizationParams& s);
void from_json(const nlohmann::json& j, StandardizationParams& s);

// Centers and scales every column and the response using this dataset's
// own statistics (sample sd, n-1 denominator). Constant columns are
// centered only and flagged with sd recorded as 1.
std::pair<Dataset, StandardizationParams> standardize(const Dataset& d);

// Applies previously computed statistics, e.g. training-set statistics to
// test features. For pooled statistics, standardize(concat_rows(a, b))
// yields the params.
Eigen::MatrixXd apply_feature_standardization(const Eigen::MatrixXd& X,
                                              const StandardizationParams& s);
Eigen::VectorXd apply_response_standardization(const Eigen::VectorXd& y,
                                               const StandardizationParams& s);
Eigen::VectorXd destandardize_response(const Eigen::VectorXd& y,
                                       const StandardizationParams& s);

// Exact inverse of standardize() up to rounding.
Dataset destandardize(const Dataset& d, const StandardizationParams& s);

// Row-wise concatenation (column layouts must match).
Dataset concat_rows(const Dataset& a, const Dataset& b);

struct FoldPlan {
  std::vector<int> assignments;  // length n, values in 1..S
  int S = 0;

  std::vector<Eigen::Index> fold_indices(int s) const;
  std::vector<Eigen::Index> complement_indices(int s) const;
};

// Deterministic balanced partition: reproducible from (n, S, seed), every
// fold nonempty, sizes differ by at most one.
FoldPlan make_folds(Eigen::Index n, int S, std::uint64_t seed);

}  // namespace skgp
