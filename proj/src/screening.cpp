#include "skgp/screening.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "skgp/parallel.hpp"

namespace skgp {

namespace {

constexpr double kRidgeJitter = 1e-8;

// Empirical quantile with linear interpolation between order statistics.
double quantile_sorted(const std::vector<double>& sorted, double q) {
  const auto n = sorted.size();
  const double h = q * static_cast<double>(n - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= n) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

// Knot vector with degree+1 clamped copies of each boundary and
// knot_count interior knots at quantiles.
std::vector<double> quantile_knots(const Eigen::VectorXd& x, int degree, int knot_count) {
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  const double lo = sorted.front();
  const double hi = sorted.back();
  std::vector<double> knots;
  knots.reserve(static_cast<std::size_t>(2 * (degree + 1) + knot_count));
  for (int i = 0; i <= degree; ++i) knots.push_back(lo);
  for (int j = 1; j <= knot_count; ++j) {
    knots.push_back(quantile_sorted(sorted, static_cast<double>(j) / (knot_count + 1)));
  }
  for (int i = 0; i <= degree; ++i) knots.push_back(hi);
  return knots;
}

// de Boor triangular scheme: the degree+1 basis values that are nonzero on
// the span starting at knot index `span`.
void basis_values(const std::vector<double>& knots, int span, double u, int degree,
                  double* out) {
  out[0] = 1.0;
  std::vector<double> left(static_cast<std::size_t>(degree) + 1);
  std::vector<double> right(static_cast<std::size_t>(degree) + 1);
  for (int j = 1; j <= degree; ++j) {
    left[static_cast<std::size_t>(j)] = u - knots[static_cast<std::size_t>(span + 1 - j)];
    right[static_cast<std::size_t>(j)] = knots[static_cast<std::size_t>(span + j)] - u;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double denom = right[static_cast<std::size_t>(r + 1)] +
                           left[static_cast<std::size_t>(j - r)];
      const double temp = denom != 0.0 ? out[r] / denom : 0.0;
      out[r] = saved + right[static_cast<std::size_t>(r + 1)] * temp;
      saved = left[static_cast<std::size_t>(j - r)] * temp;
    }
    out[j] = saved;
  }
}

int find_span(const std::vector<double>& knots, double u, int degree, int knot_count) {
  const int lo = degree;
  const int hi = degree + knot_count;  // candidate spans [lo, hi]
  int span = hi;
  if (u < knots[static_cast<std::size_t>(hi)]) {
    const auto first = knots.begin() + lo + 1;
    const auto last = knots.begin() + hi + 1;
    span = static_cast<int>(std::upper_bound(first, last, u) - knots.begin()) - 1;
  }
  // Ties in the data can produce zero-width spans; step down to the nearest
  // span of positive width so the clamped polynomial limit applies.
  while (span > lo &&
         knots[static_cast<std::size_t>(span + 1)] <= knots[static_cast<std::size_t>(span)]) {
    --span;
  }
  return span;
}

}  // namespace

Eigen::MatrixXd bspline_design(const Eigen::VectorXd& x, int degree, int knot_count) {
  if (degree < 0 || knot_count < 0) {
    throw std::invalid_argument("bspline_design: degree and knot_count must be nonnegative");
  }
  const Eigen::Index n = x.size();
  const Eigen::Index basis_dim = knot_count + degree + 1;
  if (n <= basis_dim) {
    throw std::invalid_argument("bspline_design: need more samples than basis functions");
  }
  if (x.maxCoeff() == x.minCoeff()) {
    throw std::invalid_argument("bspline_design: x is constant");
  }
  const std::vector<double> knots = quantile_knots(x, degree, knot_count);
  Eigen::MatrixXd design = Eigen::MatrixXd::Zero(n, basis_dim);
  std::vector<double> nonzero(static_cast<std::size_t>(degree) + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = x(i);
    const int span = find_span(knots, u, degree, knot_count);
    basis_values(knots, span, u, degree, nonzero.data());
    const int first_col = span - degree;
    for (int j = 0; j <= degree; ++j) {
      design(i, first_col + j) = nonzero[static_cast<std::size_t>(j)];
    }
  }
  return design;
}

double marginal_score(const Eigen::VectorXd& y, const Eigen::VectorXd& x, int degree,
                      int knot_count) {
  if (y.size() != x.size()) {
    throw std::invalid_argument("marginal_score: length mismatch");
  }
  if (x.maxCoeff() == x.minCoeff()) {
    return 0.0;  // constant columns carry no marginal association
  }
  const Eigen::MatrixXd design = bspline_design(x, degree, knot_count);
  const Eigen::VectorXd centered = y.array() - y.mean();
  const double null_rss = centered.squaredNorm();
  Eigen::MatrixXd normal = design.transpose() * design;
  normal.diagonal().array() += kRidgeJitter;
  const Eigen::VectorXd coef = normal.ldlt().solve(design.transpose() * centered);
  const double fit_rss = (centered - design * coef).squaredNorm();
  return null_rss - fit_rss;
}

ScreeningResult screen(const Dataset& d, Eigen::Index target_count, int degree,
                       int knot_count, int threads) {
  const Eigen::Index p = d.p();
  if (target_count < 1 || target_count > p) {
    throw std::invalid_argument("screen: target_count out of range [1, p]");
  }
  ScreeningResult result;
  result.spline_degree = degree;
  result.knot_count = knot_count;
  result.scores.resize(p);
  std::vector<std::uint8_t> constant(static_cast<std::size_t>(p), 0);
  parallel_for(static_cast<std::size_t>(p), threads, [&](std::size_t c) {
    const auto col = static_cast<Eigen::Index>(c);
    const Eigen::VectorXd x = d.features.col(col);
    if (x.maxCoeff() == x.minCoeff()) {
      constant[c] = 1;
      result.scores(col) = 0.0;
    } else {
      result.scores(col) = marginal_score(d.response, x, degree, knot_count);
    }
  });
  std::vector<Eigen::Index> order;
  order.reserve(static_cast<std::size_t>(p));
  for (Eigen::Index c = 0; c < p; ++c) {
    if (!constant[static_cast<std::size_t>(c)]) order.push_back(c);
  }
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (result.scores(a) != result.scores(b)) return result.scores(a) > result.scores(b);
    return a < b;
  });
  const auto keep = std::min<std::size_t>(static_cast<std::size_t>(target_count), order.size());
  result.selected.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep));
  return result;
}

void to_json(nlohmann::json& j, const ScreeningResult& r) {
  j = nlohmann::json{{"selected", r.selected},
                     {"scores", std::vector<double>(r.scores.begin(), r.scores.end())},
                     {"spline_degree", r.spline_degree},
                     {"knot_count", r.knot_count}};
}

void from_json(const nlohmann::json& j, ScreeningResult& r) {
  j.at("selected").get_to(r.selected);
  j.at("spline_degree").get_to(r.spline_degree);
  j.at("knot_count").get_to(r.knot_count);
  if (j.contains("scores") && !j.at("scores").is_null()) {
    const auto scores = j.at("scores").get<std::vector<double>>();
    r.scores = Eigen::Map<const Eigen::VectorXd>(scores.data(),
                                                 static_cast<Eigen::Index>(scores.size()));
  } else {
    r.scores.resize(0);
  }
}

}  // namespace skgp
