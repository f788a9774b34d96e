#pragma once

#include <cstdint>

#include "fasim/random.hpp"
#include "fasim/types.hpp"

namespace fasim::testing {

inline Matrix random_matrix(Index rows, Index cols, std::uint64_t seed) {
  RandomStream rng(SeedSpec{seed, 0});
  Matrix M(rows, cols);
  rng.fill_normal(M);
  return M;
}

inline Vector random_vector(Index size, std::uint64_t seed) {
  return random_matrix(size, 1, seed).col(0);
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

/// Rows of X with column means removed.
inline Matrix centered(const Matrix& X) {
  return X.rowwise() - X.colwise().mean();
}

}  // namespace fasim::testing
