#include "fasim/lp.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "fasim/error.hpp"

namespace fasim {
namespace {

class KernelSimplex {
 public:
  KernelSimplex(const Matrix& A, const Matrix& At, const Vector& c, const Vector& lo,
                const Vector& hi, const LpOptions& options)
      : A_(A), At_(At), c_(c), lo_(lo), hi_(hi), opt_(options) {
    dot_y_.resize(A.cols());
    dot_rho_.resize(A.cols());
    const Index m = A.rows();
    const Index N = A.cols();
    struct_pos_.assign(static_cast<std::size_t>(N), -1);
    row_pos_.assign(static_cast<std::size_t>(m), -1);
    at_upper_.assign(static_cast<std::size_t>(m), 0);
  }

  LpResult run() {
    const Index m = A_.rows();
    const Index N = A_.cols();
    const int cap = opt_.max_iterations > 0 ? opt_.max_iterations
                                            : static_cast<int>(20 * (m + N) + 1000);
    LpResult out;
    Vector activity(m);
    Vector xs;
    for (int iter = 0;; ++iter) {
      if (iter >= cap) {
        throw Error(ErrorKind::NotConverged, "dual simplex hit its iteration cap");
      }
      const Index k = static_cast<Index>(cols_.size());
      Vector v(k);
      for (Index l = 0; l < k; ++l) v[l] = slack_value(rows_[l]);
      xs = kinv_ * v;
      activity.setZero();
      for (Index i = 0; i < k; ++i) activity.noalias() += xs[i] * A_.col(cols_[i]);

      // leaving variable: largest bound violation among basic variables
      double worst = 0.0;
      Index leave_struct = -1;  // kernel column position
      Index leave_row = -1;     // row index of a basic slack
      bool raise = false;       // leaving value must increase to reach its bound
      for (Index i = 0; i < k; ++i) {
        if (-xs[i] > opt_.primal_tolerance && -xs[i] > worst) {
          worst = -xs[i];
          leave_struct = i;
          leave_row = -1;
          raise = true;
        }
      }
      for (Index r = 0; r < m; ++r) {
        if (row_pos_[r] >= 0) continue;
        const double below = lo_[r] - activity[r];
        const double above = activity[r] - hi_[r];
        if (below > opt_.primal_tolerance && below > worst) {
          worst = below;
          leave_struct = -1;
          leave_row = r;
          raise = true;
        } else if (above > opt_.primal_tolerance && above > worst) {
          worst = above;
          leave_struct = -1;
          leave_row = r;
          raise = false;
        }
      }
      if (leave_struct < 0 && leave_row < 0) {
        out.iterations = iter;
        break;
      }

      // duals on the kernel rows and the pivot row of B^{-1}
      Vector cs(k);
      for (Index i = 0; i < k; ++i) cs[i] = c_[cols_[i]];
      const Vector y = kinv_.transpose() * cs;
      Eigen::RowVectorXd rho(k);
      if (leave_struct >= 0) {
        rho = kinv_.row(leave_struct);
      } else {
        Eigen::RowVectorXd a_row(k);
        for (Index i = 0; i < k; ++i) a_row[i] = A_(leave_row, cols_[i]);
        rho = a_row * kinv_;
      }

      // Harris two-pass ratio test; candidates are (is_slack, index, d, alpha)
      candidates_.clear();
      // A[T, :]^T y and A[T, :]^T rho as combinations of contiguous rows
      dot_y_.setZero();
      dot_rho_.setZero();
      for (Index l = 0; l < k; ++l) {
        dot_y_.noalias() += y[l] * At_.col(rows_[l]);
        dot_rho_.noalias() += rho[l] * At_.col(rows_[l]);
      }
      if (leave_row >= 0) dot_rho_.noalias() -= At_.col(leave_row);
      for (Index j = 0; j < N; ++j) {
        if (struct_pos_[j] >= 0) continue;
        const double alpha = dot_rho_[j];
        // structural nonbasics sit at their lower bound 0
        const bool eligible = raise ? alpha < -opt_.pivot_tolerance : alpha > opt_.pivot_tolerance;
        if (eligible) candidates_.push_back({false, j, std::max(0.0, c_[j] - dot_y_[j]), alpha});
      }
      for (Index l = 0; l < k; ++l) {
        const Index t = rows_[l];
        if (lo_[t] == hi_[t]) continue;  // fixed slack cannot move
        const double alpha = -rho[l];
        const bool upper = at_upper_[t] != 0;
        const bool increases = upper ? alpha > opt_.pivot_tolerance : alpha < -opt_.pivot_tolerance;
        const bool decreases = upper ? alpha < -opt_.pivot_tolerance : alpha > opt_.pivot_tolerance;
        if (raise ? increases : decreases) {
          const double d = upper ? std::max(0.0, -y[l]) : std::max(0.0, y[l]);
          candidates_.push_back({true, t, d, alpha});
        }
      }
      if (candidates_.empty()) {
        throw Error(ErrorKind::Infeasible, "linear program is infeasible");
      }
      double bound = std::numeric_limits<double>::infinity();
      for (const auto& cand : candidates_) {
        bound = std::min(bound, (cand.d + opt_.dual_tolerance) / std::abs(cand.alpha));
      }
      const Candidate* enter = nullptr;
      for (const auto& cand : candidates_) {
        if (cand.d / std::abs(cand.alpha) <= bound &&
            (!enter || std::abs(cand.alpha) > std::abs(enter->alpha))) {
          enter = &cand;
        }
      }

      const Candidate chosen = *enter;
      if (leave_row >= 0) {
        at_upper_[leave_row] = raise ? 0 : 1;
        if (chosen.slack) {
          replace_row(row_pos_[chosen.index], leave_row, rho);
        } else {
          grow(leave_row, chosen.index, rho, chosen.alpha);
        }
      } else {
        if (chosen.slack) {
          shrink(row_pos_[chosen.index], leave_struct);
        } else {
          replace_col(leave_struct, chosen.index);
        }
      }
      if (++updates_ >= opt_.refactor_interval) refactor();
    }

    out.x = Vector::Zero(A_.cols());
    for (Index i = 0; i < static_cast<Index>(cols_.size()); ++i) {
      out.x[cols_[i]] = std::max(0.0, xs[i]);
    }
    out.objective = c_.dot(out.x);
    return out;
  }

 private:
  struct Candidate {
    bool slack;
    Index index;
    double d;
    double alpha;
  };

  double slack_value(Index row) const { return at_upper_[row] ? hi_[row] : lo_[row]; }

  // slack `row` leaves, structural `col` enters: border the kernel
  void grow(Index row, Index col, const Eigen::RowVectorXd& rho, double alpha) {
    const Index k = static_cast<Index>(cols_.size());
    Vector b(k);
    for (Index l = 0; l < k; ++l) b[l] = A_(rows_[l], col);
    const double sigma = -alpha;  // A[row, col] - A[row, S] K^{-1} A[T, col]
    const Vector kb = kinv_ * b;
    Matrix next(k + 1, k + 1);
    next.topLeftCorner(k, k) = kinv_ + kb * rho / sigma;
    next.topRightCorner(k, 1) = -kb / sigma;
    next.bottomLeftCorner(1, k) = -rho / sigma;
    next(k, k) = 1.0 / sigma;
    kinv_.swap(next);
    cols_.push_back(col);
    rows_.push_back(row);
    struct_pos_[col] = k;
    row_pos_[row] = k;
  }

  // structural at kernel column i leaves, structural `col` enters
  void replace_col(Index i, Index col) {
    const Index k = static_cast<Index>(cols_.size());
    Vector b(k);
    for (Index l = 0; l < k; ++l) b[l] = A_(rows_[l], col);
    Vector kb = kinv_ * b;
    const double pivot = kb[i];
    kb[i] -= 1.0;
    const Eigen::RowVectorXd row_i = kinv_.row(i);
    kinv_.noalias() -= kb * row_i / pivot;
    struct_pos_[cols_[i]] = -1;
    cols_[i] = col;
    struct_pos_[col] = i;
  }

  // nonbasic slack at kernel row l becomes basic, slack `row` leaves
  void replace_row(Index l, Index row, const Eigen::RowVectorXd& rho) {
    const double pivot = rho[l];
    Eigen::RowVectorXd delta = rho;
    delta[l] -= 1.0;
    const Vector col_l = kinv_.col(l);
    kinv_.noalias() -= col_l * delta / pivot;
    row_pos_[rows_[l]] = -1;
    rows_[l] = row;
    row_pos_[row] = l;
  }

  // nonbasic slack at kernel row l and structural at kernel column i both
  // become basic-slack / nonbasic: drop that row and column
  void shrink(Index l, Index i) {
    const Index k = static_cast<Index>(cols_.size());
    const double pivot = kinv_(i, l);
    const Vector col_l = kinv_.col(l);
    const Eigen::RowVectorXd row_i = kinv_.row(i);
    kinv_.noalias() -= col_l * row_i / pivot;
    // move the dropped row/column to the end, then truncate
    const Index last = k - 1;
    kinv_.row(i).swap(kinv_.row(last));
    kinv_.col(l).swap(kinv_.col(last));
    struct_pos_[cols_[i]] = -1;
    row_pos_[rows_[l]] = -1;
    cols_[i] = cols_[last];
    rows_[l] = rows_[last];
    cols_.pop_back();
    rows_.pop_back();
    if (i < last) struct_pos_[cols_[i]] = i;
    if (l < last) row_pos_[rows_[l]] = l;
    kinv_.conservativeResize(last, last);
  }

  void refactor() {
    updates_ = 0;
    const Index k = static_cast<Index>(cols_.size());
    if (k == 0) return;
    Matrix M(k, k);
    for (Index l = 0; l < k; ++l) {
      for (Index i = 0; i < k; ++i) M(l, i) = A_(rows_[l], cols_[i]);
    }
    const Eigen::PartialPivLU<Matrix> lu(M);
    kinv_ = lu.inverse();
    if (!kinv_.allFinite()) {
      throw Error(ErrorKind::NotConverged, "dual simplex basis became singular");
    }
  }

  const Matrix& A_;
  const Matrix& At_;
  const Vector& c_;
  const Vector& lo_;
  const Vector& hi_;
  LpOptions opt_;
  std::vector<Index> cols_;       // structural basics, kernel column order
  std::vector<Index> rows_;       // rows with nonbasic slacks, kernel row order
  std::vector<Index> struct_pos_;
  std::vector<Index> row_pos_;
  std::vector<char> at_upper_;
  Matrix kinv_ = Matrix(0, 0);    // rows follow cols_, columns follow rows_
  std::vector<Candidate> candidates_;
  Vector dot_y_;
  Vector dot_rho_;
  int updates_ = 0;
};

}  // namespace

LpResult solve_bounded_lp(const Matrix& A, const Vector& c, const Vector& lo, const Vector& hi,
                          const LpOptions& options) {
  const Matrix At = A.transpose();
  return solve_bounded_lp(A, At, c, lo, hi, options);
}

LpResult solve_bounded_lp(const Matrix& A, const Matrix& At, const Vector& c, const Vector& lo,
                          const Vector& hi, const LpOptions& options) {
  const Index m = A.rows();
  if (At.rows() != A.cols() || At.cols() != m) throw_invalid("lp: transpose has wrong shape");
  if (c.size() != A.cols()) throw_invalid("lp: cost length does not match columns");
  if (lo.size() != m || hi.size() != m) throw_invalid("lp: bound length does not match rows");
  if ((c.array() < 0.0).any()) throw_invalid("lp: costs must be nonnegative");
  for (Index r = 0; r < m; ++r) {
    if (std::isnan(lo[r]) || std::isnan(hi[r]) || lo[r] > hi[r]) {
      throw Error(ErrorKind::Infeasible, "lp: row " + std::to_string(r) + " has empty bounds");
    }
  }
  return KernelSimplex(A, At, c, lo, hi, options).run();
}

}  // namespace fasim
