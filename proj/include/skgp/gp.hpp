#pragma once

#include <Eigen/Dense>

#include <nlohmann/json_fwd.hpp>

namespace skgp {

// Kernel hyperparameters held fixed during a fit: length scale of the
// exponential correlation kernel and the signal-to-noise variance ratio.
struct GPHyper {
  double theta = 1.0;  // > 0
  double psi2 = 1.0;   // >= 0
};

// Scaled multivariate t law: density of a coordinate v is the univariate
// scaled t with df degrees of freedom, location loc[c], scale
// sqrt(scale(c, c)).
struct PredictiveT {
  double df = 0.0;
  Eigen::VectorXd loc;
  Eigen::MatrixXd scale;  // symmetric PSD
};

// Trained state of one exact conjugate GP regression on sketched features.
struct FittedGP {
  Eigen::MatrixXd Z;  // n x m sketched training features
  Eigen::VectorXd y;  // n responses
  GPHyper hyper;
  Eigen::MatrixXd chol_factor;  // lower L with L L^T = psi2*C + I + jitter*I
  double jitter = 0.0;          // ladder value that made the factorization succeed
  double b = 0.0;               // y^T (psi2*C + I)^{-1} y / 2

  Eigen::Index n() const { return y.size(); }
};

void to_json(nlohmann::json& j, const FittedGP& f);
void from_json(const nlohmann::json& j, FittedGP& f);

// Marginal posterior summaries on the training inputs: inverse gamma for
// the noise variance and a scaled n-variate t for the latent function.
struct PosteriorSummary {
  double ig_shape = 0.0;  // n / 2
  double ig_scale = 0.0;  // b
  PredictiveT f;
};

struct HyperSearchConfig {
  int theta_grid = 32;
  int psi2_grid = 32;
  // theta grid spans [lo_factor, hi_factor] / median pairwise distance.
  double theta_lo_factor = 0.01;
  double theta_hi_factor = 100.0;
  double psi2_lo = 1e-3;
  double psi2_hi = 1e3;
  int nm_max_iter = 200;
  double nm_tol = 1e-6;  // simplex tolerance in log parameters
};

// Exponential correlation: exp(-theta * ||z1 - z2||). Value in (0, 1],
// equal to 1 iff z1 == z2.
double kernel(const Eigen::VectorXd& z1, const Eigen::VectorXd& z2, double theta);

// Pairwise Euclidean distances between rows.
Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& Z);
Eigen::MatrixXd cross_distances(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

// Correlation matrix over the rows of Z: symmetric with unit diagonal.
Eigen::MatrixXd gram(const Eigen::MatrixXd& Z, double theta);

// Log of the hyperparameter objective: -log|psi2*C + I|/2
// - (n/2) log(y^T (psi2*C + I)^{-1} y) plus the n-dependent constant, so
// values are comparable across hyperparameters at fixed n. Computed via
// Cholesky (log-det from the factor diagonal, quadratic form from
// triangular solves).
double log_marginal(const GPHyper& hyper, const Eigen::MatrixXd& Z, const Eigen::VectorXd& y);

// Deterministic argmax search: log-spaced grid over (theta, psi2) anchored
// at the median pairwise distance of Z, refined by Nelder-Mead in log
// parameters from the best grid point.
GPHyper optimize_hyper(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y,
                       const HyperSearchConfig& search = {});

// Factorizes psi2*C + I with an escalating jitter ladder
// (0, 1e-10, 1e-8, 1e-6) and caches everything prediction needs.
FittedGP fit(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y, const GPHyper& hyper);

// Training-input posterior. Uses the form psi2*C*(psi2*C + I)^{-1}, which
// extends continuously to psi2 = 0.
PosteriorSummary posterior(const FittedGP& f);

// Posterior predictive at new sketched inputs: a scaled t with df equal to
// the number of conditioning observations. The scale matrix is
// symmetrized after assembly.
PredictiveT predict(const FittedGP& f, const Eigen::MatrixXd& Z_new);

// Log density of coordinate `coord` of pt at `value` (univariate scaled t).
double t_logpdf_marginal(const PredictiveT& pt, Eigen::Index coord, double value);

}  // namespace skgp
