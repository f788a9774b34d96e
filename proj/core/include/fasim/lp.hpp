#pragma once

#include "fasim/types.hpp"

namespace fasim {

struct LpOptions {
  double primal_tolerance = 1e-10;  // absolute, on row activities and x >= 0
  double dual_tolerance = 1e-12;
  double pivot_tolerance = 1e-7;
  int refactor_interval = 64;
  int max_iterations = 0;           // 0: 20 * (rows + cols) + 1000
};

struct LpResult {
  Vector x;
  double objective = 0.0;
  int iterations = 0;
};

/// min c^T x  subject to  x >= 0,  lo <= A x <= hi  (entries of lo / hi may be
/// infinite). Requires c >= 0 so that the all-slack basis is dual feasible.
///
/// Bounded dual simplex. A basis is described by the structural columns S it
/// holds and the rows T whose slacks are nonbasic; only the inverse of the
/// square kernel A[T, S] is kept, so an iteration costs O((m + N) |S|) when
/// the optimum is sparse. Throws Infeasible or NotConverged.
LpResult solve_bounded_lp(const Matrix& A, const Vector& c, const Vector& lo, const Vector& hi,
                          const LpOptions& options = {});

/// Same, reusing a precomputed At = A^T across many right-hand sides.
LpResult solve_bounded_lp(const Matrix& A, const Matrix& At, const Vector& c, const Vector& lo,
                          const Vector& hi, const LpOptions& options = {});

}  // namespace fasim
