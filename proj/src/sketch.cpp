#include "skgp/sketch.hpp"

#include <stdexcept>

#include "skgp/rng.hpp"

namespace skgp {

SketchMatrix generate_sketch(std::uint64_t seed, int m, const ScreeningResult& screening) {
  if (m < 1) {
    throw std::invalid_argument("generate_sketch: m must be at least 1");
  }
  if (screening.selected.empty()) {
    throw std::invalid_argument("generate_sketch: screening selected no features");
  }
  SketchMatrix s;
  s.m = m;
  s.screened = screening.selected;
  s.seed = seed;
  const auto cols = static_cast<Eigen::Index>(s.screened.size());
  s.gauss_block.resize(m, cols);
  std::uint64_t index = 0;
  for (Eigen::Index r = 0; r < m; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      s.gauss_block(r, c) = rng::normal(seed, /*stream=*/0, index++);
    }
  }
  return s;
}

Eigen::MatrixXd apply_sketch(const SketchMatrix& s, const Eigen::MatrixXd& X) {
  for (const Eigen::Index idx : s.screened) {
    if (idx < 0 || idx >= X.cols()) {
      throw std::invalid_argument("apply_sketch: screened index out of bounds for X");
    }
  }
  const Eigen::MatrixXd restricted = X(Eigen::all, s.screened);
  return restricted * s.gauss_block.transpose();
}

}  // namespace skgp
