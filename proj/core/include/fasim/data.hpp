#pragma once

#include <string>
#include <vector>

#include "fasim/types.hpp"

namespace fasim {

/// Observed covariates and response. Validated on construction:
/// n >= 2, p >= 1, rows(X) == size(Y), and every entry finite.
class Dataset {
 public:
  Dataset(Matrix X, Vector Y, std::vector<std::string> names = {});

  const Matrix& X() const noexcept { return X_; }
  const Vector& Y() const noexcept { return Y_; }
  const std::vector<std::string>& names() const noexcept { return names_; }

  Index n() const noexcept { return X_.rows(); }
  Index p() const noexcept { return X_.cols(); }

  /// Column label for covariate j; falls back to "x<j>" when unnamed.
  std::string name(Index j) const;

  /// Same covariates with a replaced response (validated again).
  Dataset with_response(Vector Y) const;

 private:
  Matrix X_;
  Vector Y_;
  std::vector<std::string> names_;
};

/// h(Y) = F_n(Y) - 1/2 together with the max-rank convention ranks.
struct TransformedResponse {
  Vector values;
  std::vector<Index> ranks;  // rank_i = #{j : Y_j <= Y_i}

  Index size() const noexcept { return values.size(); }
};

/// Empirical-CDF transform. Ties receive the maximal count, so
/// values_i = #{j : Y_j <= Y_i} / n - 1/2 exactly.
TransformedResponse rank_transform(const Vector& Y);

struct CenteredMatrix {
  Matrix centered;
  Vector means;
};

CenteredMatrix center_columns(const Matrix& X);

}  // namespace fasim
