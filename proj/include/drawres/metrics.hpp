#ifndef DRAWRES_METRICS_HPP
#define DRAWRES_METRICS_HPP

#include <cmath>
#include <vector>

#include "drawres/core.hpp"
#include "drawres/ranks.hpp"

namespace drawres {

template <typename Scalar>
struct BasicMetrics {
  Scalar mse{};
  Scalar rmse{};
  Scalar r{};
};
using Metrics = BasicMetrics<double>;

/// MSE, RMSE = sqrt(MSE) and the Pearson R of predictions against targets.
/// Throws DomainError for empty or mismatched inputs and when R is undefined.
template <typename DerivedP, typename DerivedT>
BasicMetrics<typename DerivedP::Scalar> evaluate(const Eigen::MatrixBase<DerivedP> &predictions,
                                                 const Eigen::MatrixBase<DerivedT> &targets) {
  if (predictions.size() == 0 || predictions.size() != targets.size())
    throw DomainError("evaluate: predictions and targets need equal nonzero lengths");
  BasicMetrics<typename DerivedP::Scalar> m;
  m.mse = (predictions - targets).squaredNorm() / typename DerivedP::Scalar(predictions.size());
  m.rmse = std::sqrt(m.mse);
  if (predictions.size() == 1)
    throw DomainError("evaluate: correlation undefined for a single point");
  m.r = pearson_r(predictions, targets);
  return m;
}

/// Acceptance band [mu1 - n*sigma1, mu1 + n*sigma1].
struct SpecLimits {
  double mu1 = 1150.0;
  double sigma1 = 5.0;
  double n = 4.0;

  double lower() const { return mu1 - n * sigma1; }
  double upper() const { return mu1 + n * sigma1; }
  void validate() const {
    if (!(sigma1 > 0.0) || !(n > 0.0))
      throw DomainError("SpecLimits: sigma1 and n must be positive");
  }
};

/// True where a value falls outside the acceptance band.
template <typename Derived>
std::vector<bool> flag_substandard(const Eigen::MatrixBase<Derived> &values,
                                   const SpecLimits &limits) {
  limits.validate();
  std::vector<bool> mask(static_cast<std::size_t>(values.size()));
  const double lo = limits.lower(), hi = limits.upper();
  for (Index i = 0; i < values.size(); ++i)
    mask[static_cast<std::size_t>(i)] = values(i) < lo || values(i) > hi;
  return mask;
}

} // namespace drawres

#endif // DRAWRES_METRICS_HPP
