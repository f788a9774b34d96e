#include "fasim/data.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fasim/error.hpp"

namespace fasim {

Dataset::Dataset(Matrix X, Vector Y, std::vector<std::string> names)
    : X_(std::move(X)), Y_(std::move(Y)), names_(std::move(names)) {
  if (X_.rows() < 2) throw_invalid("dataset needs at least 2 observations");
  if (X_.cols() < 1) throw_invalid("dataset needs at least 1 covariate");
  if (X_.rows() != Y_.size()) {
    throw_invalid("covariate rows (" + std::to_string(X_.rows()) +
                  ") do not match response length (" +
                  std::to_string(Y_.size()) + ")");
  }
  if (!names_.empty() && static_cast<Index>(names_.size()) != X_.cols()) {
    throw_invalid("column name count does not match covariate count");
  }
  if (!X_.allFinite()) throw_invalid("covariates contain non-finite entries");
  if (!Y_.allFinite()) throw_invalid("response contains non-finite entries");
}

std::string Dataset::name(Index j) const {
  if (!names_.empty()) return names_[static_cast<std::size_t>(j)];
  return "x" + std::to_string(j);
}

Dataset Dataset::with_response(Vector Y) const {
  return Dataset(X_, std::move(Y), names_);
}

TransformedResponse rank_transform(const Vector& Y) {
  const Index n = Y.size();
  if (n < 1) throw_invalid("rank_transform needs a non-empty response");
  if (!Y.allFinite()) throw_invalid("response contains non-finite entries");

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return Y[a] < Y[b]; });

  TransformedResponse out;
  out.values.resize(n);
  out.ranks.assign(static_cast<std::size_t>(n), 0);
  const double inv_n = 1.0 / static_cast<double>(n);
  Index start = 0;
  while (start < n) {
    Index stop = start + 1;
    while (stop < n && Y[order[stop]] == Y[order[start]]) ++stop;
    // every member of the tie block shares the count of the block's end
    for (Index k = start; k < stop; ++k) {
      const Index i = order[k];
      out.ranks[static_cast<std::size_t>(i)] = stop;
      out.values[i] = static_cast<double>(stop) * inv_n - 0.5;
    }
    start = stop;
  }
  return out;
}

CenteredMatrix center_columns(const Matrix& X) {
  if (X.rows() < 2) throw_invalid("center_columns needs at least 2 rows");
  CenteredMatrix out;
  out.means = X.colwise().mean().transpose();
  out.centered = X.rowwise() - out.means.transpose();
  return out;
}

}  // namespace fasim
