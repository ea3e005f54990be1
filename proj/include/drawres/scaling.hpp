#ifndef DRAWRES_SCALING_HPP
#define DRAWRES_SCALING_HPP

#include "drawres/core.hpp"

namespace drawres {

/// Per-column z-score transform fitted on training rows only. Columns with zero
/// spread keep scale 1.
struct Standardizer {
  VectorXd mean;
  VectorXd scale;

  static Standardizer fit(const Ref<const MatrixXd> &X) {
    Standardizer s;
    const double n = static_cast<double>(X.rows());
    s.mean = X.colwise().mean().transpose();
    s.scale.resize(X.cols());
    for (Index c = 0; c < X.cols(); ++c) {
      const double var = (X.col(c).array() - s.mean[c]).square().sum() / n;
      s.scale[c] = var > 0.0 ? std::sqrt(var) : 1.0;
    }
    return s;
  }

  MatrixXd transform(const Ref<const MatrixXd> &X) const {
    return (X.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
  }
};

/// Scalar z-score for the target.
struct TargetScaler {
  double mean = 0.0;
  double scale = 1.0;

  static TargetScaler fit(const Ref<const VectorXd> &y) {
    TargetScaler t;
    t.mean = y.mean();
    const double var = (y.array() - t.mean).square().mean();
    t.scale = var > 0.0 ? std::sqrt(var) : 1.0;
    return t;
  }

  VectorXd transform(const Ref<const VectorXd> &y) const {
    return (y.array() - mean) / scale;
  }
  VectorXd inverse(const Ref<const VectorXd> &z) const { return z.array() * scale + mean; }
  double inverse(double z) const { return z * scale + mean; }
};

} // namespace drawres

#endif // DRAWRES_SCALING_HPP
