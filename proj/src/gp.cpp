#include "skgp/gp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "skgp/student_t.hpp"

namespace skgp {

namespace {

constexpr std::array<double, 4> kJitterLadder = {0.0, 1e-10, 1e-8, 1e-6};

struct CholFactor {
  Eigen::MatrixXd L;  // lower triangular
  double jitter = 0.0;
};

// Cholesky of A + jitter*I, escalating through the ladder.
CholFactor chol_with_jitter(const Eigen::MatrixXd& A) {
  Eigen::MatrixXd work = A;
  for (const double jitter : kJitterLadder) {
    if (jitter > 0.0) {
      work = A;
      work.diagonal().array() += jitter;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(work);
    if (llt.info() == Eigen::Success) {
      return CholFactor{llt.matrixL(), jitter};
    }
  }
  throw std::runtime_error(
      "gp: Cholesky failed after jitter escalation; psi2*C + I is numerically singular");
}

Eigen::VectorXd chol_solve(const Eigen::MatrixXd& L, Eigen::VectorXd rhs) {
  L.triangularView<Eigen::Lower>().solveInPlace(rhs);
  L.transpose().triangularView<Eigen::Upper>().solveInPlace(rhs);
  return rhs;
}

Eigen::MatrixXd chol_solve(const Eigen::MatrixXd& L, Eigen::MatrixXd rhs) {
  L.triangularView<Eigen::Lower>().solveInPlace(rhs);
  L.transpose().triangularView<Eigen::Upper>().solveInPlace(rhs);
  return rhs;
}

double log_marginal_from_gram(double psi2, const Eigen::MatrixXd& C,
                              const Eigen::VectorXd& y) {
  const auto n = static_cast<double>(y.size());
  Eigen::MatrixXd A = psi2 * C;
  A.diagonal().array() += 1.0;
  const CholFactor chol = chol_with_jitter(A);
  const double logdet = 2.0 * chol.L.diagonal().array().log().sum();
  Eigen::VectorXd half = y;
  chol.L.triangularView<Eigen::Lower>().solveInPlace(half);
  const double quad = half.squaredNorm();
  return -0.5 * logdet - 0.5 * n * std::log(quad) + 0.5 * n * std::log(2.0) +
         std::lgamma(0.5 * n) - 0.5 * n * std::log(2.0 * M_PI);
}

double median_of(std::vector<double> values) {
  if (values.empty()) return 0.0;
  const auto mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid),
                   values.end());
  double hi = values[mid];
  if (values.size() % 2 == 1) return hi;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid) - 1,
                   values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (values[mid - 1] + hi);
}

// Nelder-Mead in 2-D over (log theta, log psi2), maximizing.
Eigen::Vector2d nelder_mead_2d(const std::function<double(const Eigen::Vector2d&)>& objective,
                               const Eigen::Vector2d& start, const Eigen::Vector2d& step,
                               int max_iter, double tol) {
  struct Vertex {
    Eigen::Vector2d x;
    double f;
  };
  std::array<Vertex, 3> simplex;
  simplex[0] = {start, objective(start)};
  for (int d = 0; d < 2; ++d) {
    Eigen::Vector2d x = start;
    x(d) += step(d);
    simplex[static_cast<std::size_t>(d + 1)] = {x, objective(x)};
  }
  auto by_value = [](const Vertex& a, const Vertex& b) { return a.f > b.f; };
  for (int iter = 0; iter < max_iter; ++iter) {
    std::sort(simplex.begin(), simplex.end(), by_value);  // best first
    const double diameter =
        std::max((simplex[0].x - simplex[1].x).cwiseAbs().maxCoeff(),
                 std::max((simplex[0].x - simplex[2].x).cwiseAbs().maxCoeff(),
                          (simplex[1].x - simplex[2].x).cwiseAbs().maxCoeff()));
    if (diameter < tol) break;
    const Eigen::Vector2d centroid = 0.5 * (simplex[0].x + simplex[1].x);
    const Eigen::Vector2d reflected = centroid + (centroid - simplex[2].x);
    const double f_reflected = objective(reflected);
    if (f_reflected > simplex[0].f) {
      const Eigen::Vector2d expanded = centroid + 2.0 * (centroid - simplex[2].x);
      const double f_expanded = objective(expanded);
      simplex[2] = f_expanded > f_reflected ? Vertex{expanded, f_expanded}
                                            : Vertex{reflected, f_reflected};
    } else if (f_reflected > simplex[1].f) {
      simplex[2] = {reflected, f_reflected};
    } else {
      const Eigen::Vector2d contracted = centroid + 0.5 * (simplex[2].x - centroid);
      const double f_contracted = objective(contracted);
      if (f_contracted > simplex[2].f) {
        simplex[2] = {contracted, f_contracted};
      } else {
        for (int k = 1; k < 3; ++k) {
          auto& v = simplex[static_cast<std::size_t>(k)];
          v.x = simplex[0].x + 0.5 * (v.x - simplex[0].x);
          v.f = objective(v.x);
        }
      }
    }
  }
  std::sort(simplex.begin(), simplex.end(), by_value);
  return simplex[0].x;
}

}  // namespace

double kernel(const Eigen::VectorXd& z1, const Eigen::VectorXd& z2, double theta) {
  if (!(theta > 0.0)) {
    throw std::invalid_argument("kernel: theta must be positive");
  }
  if (z1.size() != z2.size()) {
    throw std::invalid_argument("kernel: dimension mismatch");
  }
  return std::exp(-theta * (z1 - z2).norm());
}

Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& Z) {
  const Eigen::Index n = Z.rows();
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = (Z.row(i) - Z.row(j)).norm();
      D(i, j) = d;
      D(j, i) = d;
    }
  }
  return D;
}

Eigen::MatrixXd cross_distances(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  if (A.cols() != B.cols()) {
    throw std::invalid_argument("cross_distances: column mismatch");
  }
  Eigen::MatrixXd D(A.rows(), B.rows());
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < B.rows(); ++j) {
      D(i, j) = (A.row(i) - B.row(j)).norm();
    }
  }
  return D;
}

Eigen::MatrixXd gram(const Eigen::MatrixXd& Z, double theta) {
  if (!(theta > 0.0)) {
    throw std::invalid_argument("gram: theta must be positive");
  }
  return (-theta * pairwise_distances(Z)).array().exp();
}

double log_marginal(const GPHyper& hyper, const Eigen::MatrixXd& Z,
                    const Eigen::VectorXd& y) {
  if (Z.rows() != y.size()) {
    throw std::invalid_argument("log_marginal: Z rows must match y length");
  }
  if (!(hyper.theta > 0.0) || hyper.psi2 < 0.0) {
    throw std::invalid_argument("log_marginal: invalid hyperparameters");
  }
  return log_marginal_from_gram(hyper.psi2, gram(Z, hyper.theta), y);
}

GPHyper optimize_hyper(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y,
                       const HyperSearchConfig& search) {
  const Eigen::Index n = Z.rows();
  if (n < 2) {
    throw std::invalid_argument("optimize_hyper: need at least 2 samples");
  }
  if (Z.rows() != y.size()) {
    throw std::invalid_argument("optimize_hyper: Z rows must match y length");
  }
  const Eigen::MatrixXd D = pairwise_distances(Z);
  std::vector<double> offdiag;
  offdiag.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) offdiag.push_back(D(i, j));
  }
  double dbar = median_of(std::move(offdiag));
  if (!(dbar > 0.0)) dbar = 1.0;  // all rows identical; theta is irrelevant

  const double log_theta_lo = std::log(search.theta_lo_factor / dbar);
  const double log_theta_hi = std::log(search.theta_hi_factor / dbar);
  const double log_psi2_lo = std::log(search.psi2_lo);
  const double log_psi2_hi = std::log(search.psi2_hi);

  auto objective = [&](const Eigen::Vector2d& log_params) -> double {
    const double theta = std::exp(log_params(0));
    const double psi2 = std::exp(log_params(1));
    try {
      return log_marginal_from_gram(psi2, (-theta * D.array()).exp().matrix(), y);
    } catch (const std::runtime_error&) {
      return -std::numeric_limits<double>::infinity();
    }
  };

  const double theta_step =
      search.theta_grid > 1 ? (log_theta_hi - log_theta_lo) / (search.theta_grid - 1) : 0.0;
  const double psi2_step =
      search.psi2_grid > 1 ? (log_psi2_hi - log_psi2_lo) / (search.psi2_grid - 1) : 0.0;
  Eigen::Vector2d best(log_theta_lo, log_psi2_lo);
  double best_value = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < search.theta_grid; ++i) {
    for (int j = 0; j < search.psi2_grid; ++j) {
      const Eigen::Vector2d candidate(log_theta_lo + i * theta_step,
                                      log_psi2_lo + j * psi2_step);
      const double value = objective(candidate);
      if (value > best_value) {
        best_value = value;
        best = candidate;
      }
    }
  }
  const Eigen::Vector2d step(theta_step > 0.0 ? 0.5 * theta_step : 0.1,
                             psi2_step > 0.0 ? 0.5 * psi2_step : 0.1);
  const Eigen::Vector2d refined =
      nelder_mead_2d(objective, best, step, search.nm_max_iter, search.nm_tol);
  const Eigen::Vector2d final_point = objective(refined) >= best_value ? refined : best;
  return GPHyper{std::exp(final_point(0)), std::exp(final_point(1))};
}

FittedGP fit(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y, const GPHyper& hyper) {
  if (Z.rows() != y.size()) {
    throw std::invalid_argument("fit: Z rows must match y length");
  }
  if (!(hyper.theta > 0.0) || hyper.psi2 < 0.0) {
    throw std::invalid_argument("fit: invalid hyperparameters");
  }
  FittedGP f;
  f.Z = Z;
  f.y = y;
  f.hyper = hyper;
  Eigen::MatrixXd A = hyper.psi2 * gram(Z, hyper.theta);
  A.diagonal().array() += 1.0;
  CholFactor chol = chol_with_jitter(A);
  f.chol_factor = std::move(chol.L);
  f.jitter = chol.jitter;
  Eigen::VectorXd half = y;
  f.chol_factor.triangularView<Eigen::Lower>().solveInPlace(half);
  f.b = 0.5 * half.squaredNorm();
  return f;
}

PosteriorSummary posterior(const FittedGP& f) {
  const auto n = static_cast<double>(f.n());
  const Eigen::MatrixXd C = gram(f.Z, f.hyper.theta);
  // psi2*C*(psi2*C + I)^{-1}, assembled as psi2*(psi2*C + I)^{-1}*C, which
  // is the same matrix because C and the resolvent commute.
  const Eigen::MatrixXd M = f.hyper.psi2 * chol_solve(f.chol_factor, C);
  PosteriorSummary summary;
  summary.ig_shape = 0.5 * n;
  summary.ig_scale = f.b;
  summary.f.df = n;
  summary.f.loc = M * f.y;
  summary.f.scale = (2.0 * f.b / n) * 0.5 * (M + M.transpose());
  return summary;
}

PredictiveT predict(const FittedGP& f, const Eigen::MatrixXd& Z_new) {
  if (Z_new.cols() != f.Z.cols()) {
    throw std::invalid_argument("predict: sketched dimension mismatch");
  }
  const auto n = static_cast<double>(f.n());
  const double psi2 = f.hyper.psi2;
  const Eigen::MatrixXd C_no =
      (-f.hyper.theta * cross_distances(Z_new, f.Z).array()).exp();
  const Eigen::MatrixXd C_nn = gram(Z_new, f.hyper.theta);
  PredictiveT pt;
  pt.df = n;
  pt.loc = psi2 * (C_no * chol_solve(f.chol_factor, f.y));
  Eigen::MatrixXd scale =
      psi2 * C_nn - psi2 * psi2 * (C_no * chol_solve(f.chol_factor, Eigen::MatrixXd(C_no.transpose())));
  scale.diagonal().array() += 1.0;
  scale *= 2.0 * f.b / n;
  pt.scale = 0.5 * (scale + scale.transpose());
  return pt;
}

double t_logpdf_marginal(const PredictiveT& pt, Eigen::Index coord, double value) {
  if (coord < 0 || coord >= pt.loc.size()) {
    throw std::invalid_argument("t_logpdf_marginal: coordinate out of range");
  }
  const double s2 = pt.scale(coord, coord);
  if (!(s2 > 0.0)) {
    throw std::invalid_argument("t_logpdf_marginal: nonpositive scale entry");
  }
  return studentt::log_pdf(value, pt.df, pt.loc(coord), std::sqrt(s2));
}

void to_json(nlohmann::json& j, const FittedGP& f) {
  const auto matrix_to_rows = [](const Eigen::MatrixXd& M) {
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(M.rows()));
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
      rows[static_cast<std::size_t>(i)].assign(M.row(i).begin(), M.row(i).end());
    }
    return rows;
  };
  j = nlohmann::json{{"format_version", 1},
                     {"theta", f.hyper.theta},
                     {"psi2", f.hyper.psi2},
                     {"jitter", f.jitter},
                     {"b", f.b},
                     {"y", std::vector<double>(f.y.begin(), f.y.end())},
                     {"Z", matrix_to_rows(f.Z)},
                     {"chol_factor", matrix_to_rows(f.chol_factor)}};
}

void from_json(const nlohmann::json& j, FittedGP& f) {
  if (j.at("format_version").get<int>() != 1) {
    throw std::runtime_error("FittedGP: unsupported format version");
  }
  const auto rows_to_matrix = [](const std::vector<std::vector<double>>& rows) {
    const auto r = static_cast<Eigen::Index>(rows.size());
    const auto c = r > 0 ? static_cast<Eigen::Index>(rows[0].size()) : 0;
    Eigen::MatrixXd M(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
      M.row(i) = Eigen::Map<const Eigen::RowVectorXd>(rows[static_cast<std::size_t>(i)].data(), c);
    }
    return M;
  };
  f.hyper.theta = j.at("theta").get<double>();
  f.hyper.psi2 = j.at("psi2").get<double>();
  f.jitter = j.at("jitter").get<double>();
  f.b = j.at("b").get<double>();
  const auto y = j.at("y").get<std::vector<double>>();
  f.y = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
  f.Z = rows_to_matrix(j.at("Z").get<std::vector<std::vector<double>>>());
  f.chol_factor = rows_to_matrix(j.at("chol_factor").get<std::vector<std::vector<double>>>());
}

}  // namespace skgp
