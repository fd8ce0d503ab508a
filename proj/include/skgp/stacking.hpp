#pragma once

#include <Eigen/Dense>
#include <span>
#include <utility>
#include <vector>

#include "skgp/dataset.hpp"
#include "skgp/gp.hpp"
#include "skgp/sketch.hpp"

namespace skgp {

// One stacking member: a sketch together with the GP trained on the
// sketched full training data. The hyperparameters are optimized once on
// the full data and held fixed through fold refits.
struct SketchedGP {
  SketchMatrix sketch;
  FittedGP model;
};

// Held-out predictive log densities: entry (k, i) is the log density of
// observation i under model k conditioned on the folds not containing i.
// Underflowed values are floored at -700 and flagged.
struct DensityTable {
  Eigen::MatrixXd log_values;          // K x n
  std::vector<std::uint8_t> floored;   // K * n row-major flags

  Eigen::Index models() const { return log_values.rows(); }
  Eigen::Index observations() const { return log_values.cols(); }
};

struct StackWeights {
  Eigen::VectorXd w;  // simplex: entries in [0, 1], summing to 1
};

struct WeightOptResult {
  StackWeights weights;
  double objective = 0.0;                 // mean held-out log score of the mixture
  Eigen::VectorXd vertex_objectives;      // per-model held-out mean log score
  std::vector<double> objective_trace;    // monotone nondecreasing fixed-point trace
  int iterations = 0;
};

// Mixture of per-model predictive t laws over a common set of test points.
struct StackedPredictive {
  StackWeights weights;
  std::vector<PredictiveT> components;
};

// For each model and fold, refits the conjugate linear algebra on the fold
// complement (hyperparameters fixed), predicts the fold jointly and takes
// per-coordinate marginal log densities at the observed responses. The
// (model, fold) grid runs on a worker pool.
DensityTable fold_densities(std::span<const SketchedGP> models, const Dataset& d,
                            const FoldPlan& plan, int threads = 1);

// Maximizes the mean log mixture density over the simplex with the
// multiplicative fixed-point iteration (uniform start, stop when the
// objective improves by less than 1e-10 or after 10000 iterations). The
// objective is concave, so the iteration climbs to the global optimum; a
// vertex safeguard guarantees the returned weights score at least as well
// as every single model.
WeightOptResult optimize_weights(const DensityTable& table);

// Sketches X_new with each member's own sketch and predicts. Components
// share the coordinate order of X_new rows.
StackedPredictive stack_predict(std::span<const SketchedGP> models, const StackWeights& w,
                                const Eigen::MatrixXd& X_new);

// Weighted mixture of component locations; requires df > 1 so means exist.
Eigen::VectorXd mixture_mean(const StackedPredictive& sp);

// Solves F(v) = q on the mixture CDF by bisection over
// [min_k(loc_k - 50 s_k), max_k(loc_k + 50 s_k)] to tolerance 1e-8.
double mixture_quantile(const StackedPredictive& sp, Eigen::Index coord, double q);

// Central 95% predictive interval (quantiles 0.025 and 0.975).
std::pair<double, double> mixture_interval95(const StackedPredictive& sp, Eigen::Index coord);

}  // namespace skgp
