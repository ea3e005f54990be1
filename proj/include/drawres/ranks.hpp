#ifndef DRAWRES_RANKS_HPP
#define DRAWRES_RANKS_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "drawres/core.hpp"

namespace drawres {

/// 1-based average ranks; tied values share the mean of the positions they occupy.
template <typename Derived>
Vector<typename Derived::Scalar> average_ranks(const Eigen::DenseBase<Derived> &values) {
  using Scalar = typename Derived::Scalar;
  const Index n = values.size();
  if (n == 0)
    throw DomainError("average_ranks: empty input");
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return values(a) < values(b); });
  Vector<Scalar> ranks(n);
  Index i = 0;
  while (i < n) {
    Index j = i;
    while (j + 1 < n && values(order[j + 1]) == values(order[i]))
      ++j;
    const Scalar r = Scalar(i + j + 2) / Scalar(2);
    for (Index k = i; k <= j; ++k)
      ranks(order[k]) = r;
    i = j + 1;
  }
  return ranks;
}

/// Pearson correlation. Throws DomainError when either input is constant.
template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar pearson_r(const Eigen::MatrixBase<DerivedX> &x,
                                    const Eigen::MatrixBase<DerivedY> &y) {
  using Scalar = typename DerivedX::Scalar;
  if (x.size() != y.size() || x.size() < 2)
    throw DomainError("correlation: inputs need equal lengths >= 2");
  const Vector<Scalar> dx = x.array() - x.mean();
  const Vector<Scalar> dy = y.array() - y.mean();
  const Scalar sxx = dx.squaredNorm();
  const Scalar syy = dy.squaredNorm();
  if (!(sxx > Scalar(0)) || !(syy > Scalar(0)))
    throw DomainError("correlation undefined for constant input");
  const Scalar r = dx.dot(dy) / std::sqrt(sxx * syy);
  return std::clamp(r, Scalar(-1), Scalar(1));
}

/// Spearman's rho as the Pearson correlation of average ranks (tie-robust form).
template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar spearman_rho(const Eigen::MatrixBase<DerivedX> &x,
                                       const Eigen::MatrixBase<DerivedY> &y) {
  if (x.size() != y.size() || x.size() < 2)
    throw DomainError("spearman_rho: inputs need equal lengths >= 2");
  return pearson_r(average_ranks(x), average_ranks(y));
}

} // namespace drawres

#endif // DRAWRES_RANKS_HPP
