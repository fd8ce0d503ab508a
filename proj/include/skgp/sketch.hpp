#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "skgp/screening.hpp"

namespace skgp {

// Random sketch acting on the screened coordinates. Only the dense block
// over the screened indices is stored; coordinates outside `screened` are
// implicitly multiplied by zero, so the full short-and-fat matrix never
// needs to be materialized even when p is huge.
struct SketchMatrix {
  int m = 0;
  std::vector<Eigen::Index> screened;  // column indices the block acts on
  Eigen::MatrixXd gauss_block;         // m x |screened|, iid standard normal
  std::uint64_t seed = 0;
};

// Deterministic for fixed (seed, m, screened): entry (r, c) is the
// row-major draw r*|screened|+c from the pinned normal generator.
SketchMatrix generate_sketch(std::uint64_t seed, int m, const ScreeningResult& screening);

// Maps each row of X (n x p) to its m-dimensional sketch: row i becomes
// gauss_block * X(i, screened).
Eigen::MatrixXd apply_sketch(const SketchMatrix& s, const Eigen::MatrixXd& X);

}  // namespace skgp
