#pragma once

#include <Eigen/Dense>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "skgp/dataset.hpp"

namespace skgp {

struct ScreeningResult {
  Eigen::VectorXd scores;              // length p, marginal explained sum of squares
  std::vector<Eigen::Index> selected;  // distinct, sorted by descending score,
                                       // ties broken by lower column index
  int spline_degree = 3;
  int knot_count = 4;
};

// Serialized form keeps fits reproducible without re-screening; selected
// indices are mandatory, scores optional.
void to_json(nlohmann::json& j, const ScreeningResult& r);
void from_json(const nlohmann::json& j, ScreeningResult& r);

// B-spline design matrix (n x (knot_count + degree + 1)) on knots placed at
// empirical quantiles of x, boundary knots clamped. Rows form a partition
// of unity.
Eigen::MatrixXd bspline_design(const Eigen::VectorXd& x, int degree, int knot_count);

// Marginal explained sum of squares: RSS of the intercept-only fit minus
// RSS of the B-spline fit of y on x. Constant x scores exactly zero. The
// least-squares solve applies a ridge jitter of 1e-8 to the normal
// equations for rank safety.
double marginal_score(const Eigen::VectorXd& y, const Eigen::VectorXd& x, int degree,
                      int knot_count);

// Ranks all features by marginal_score and keeps the target_count highest.
// Constant columns are never selected. Per-feature scoring runs as a
// parallel map over columns.
ScreeningResult screen(const Dataset& d, Eigen::Index target_count, int degree = 3,
                       int knot_count = 4, int threads = 1);

}  // namespace skgp
