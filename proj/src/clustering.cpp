#include "drawres/clustering.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace drawres {

MatrixXd subtractive_clusters(const Ref<const MatrixXd> &X, const SubtractiveParams &params) {
  const Index n = X.rows(), d = X.cols();
  if (n < 1)
    throw DomainError("subtractive_clusters: no data");
  if (!(params.radius > 0.0))
    throw DomainError("subtractive_clusters: radius must be positive");

  const Eigen::RowVectorXd lo = X.colwise().minCoeff();
  const Eigen::RowVectorXd span = X.colwise().maxCoeff() - lo;
  const Eigen::RowVectorXd safe_span = (span.array() > 0.0).select(span, 1.0);
  const MatrixXd U = (X.rowwise() - lo).array().rowwise() / safe_span.array();

  const double alpha = 4.0 / (params.radius * params.radius);
  const double rb = params.squash * params.radius;
  const double beta = 4.0 / (rb * rb);

  const VectorXd sq = U.rowwise().squaredNorm();
  VectorXd potential = VectorXd::Zero(n);
  constexpr Index block = 256;
  for (Index start = 0; start < n; start += block) {
    const Index m = std::min(block, n - start);
    MatrixXd dist = -2.0 * (U.middleRows(start, m) * U.transpose());
    dist.colwise() += sq.segment(start, m);
    dist.rowwise() += sq.transpose();
    potential.segment(start, m) = (-alpha * dist.cwiseMax(0.0)).array().exp().rowwise().sum();
  }

  std::vector<Index> chosen;
  Index first_idx = 0;
  const double first = potential.maxCoeff(&first_idx);
  Index idx = first_idx;
  double p_star = first;
  while (true) {
    bool accept = false;
    if (chosen.empty() || p_star > params.accept_ratio * first) {
      accept = true;
    } else if (p_star < params.reject_ratio * first) {
      break;
    } else {
      double dmin = std::numeric_limits<double>::infinity();
      for (Index c : chosen)
        dmin = std::min(dmin, (U.row(idx) - U.row(c)).norm());
      accept = dmin / params.radius + p_star / first >= 1.0;
    }
    if (accept) {
      chosen.push_back(idx);
      if (params.max_centers > 0 && static_cast<int>(chosen.size()) >= params.max_centers)
        break;
      const VectorXd d2 = (U.rowwise() - U.row(idx)).rowwise().squaredNorm();
      potential -= p_star * (-beta * d2).array().exp().matrix();
      potential = potential.cwiseMax(0.0);
    } else {
      potential[idx] = 0.0;
    }
    p_star = potential.maxCoeff(&idx);
    if (!(p_star > 0.0))
      break;
  }

  MatrixXd centers(static_cast<Index>(chosen.size()), d);
  for (std::size_t k = 0; k < chosen.size(); ++k)
    centers.row(static_cast<Index>(k)) = X.row(chosen[k]);
  return centers;
}

FcmResult fcm_clusters(const Ref<const MatrixXd> &X, const FcmParams &params) {
  const Index n = X.rows(), d = X.cols(), c = params.clusters;
  if (n < 1)
    throw DomainError("fcm_clusters: no data");
  if (c < 1)
    throw DomainError("fcm_clusters: need at least one cluster");
  if (!(params.exponent > 1.0))
    throw DomainError("fcm_clusters: exponent must exceed 1");

  FcmResult res;
  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  res.membership = MatrixXd::NullaryExpr(n, c, [&] { return unit(rng) + 1e-3; });
  res.membership.array().colwise() /= res.membership.rowwise().sum().array();
  res.centers = MatrixXd::Zero(c, d);

  const double m = params.exponent;
  const double power = 2.0 / (m - 1.0);
  for (int it = 1; it <= std::max(1, params.max_iter); ++it) {
    res.iterations = it;
    const MatrixXd um = res.membership.array().pow(m).matrix();
    MatrixXd centers = um.transpose() * X;
    centers.array().colwise() /= um.colwise().sum().transpose().array();
    const double moved =
        it == 1 ? std::numeric_limits<double>::infinity()
                : (centers - res.centers).rowwise().norm().maxCoeff();
    res.centers = std::move(centers);

    MatrixXd dist(n, c);
    for (Index k = 0; k < c; ++k)
      dist.col(k) = (X.rowwise() - res.centers.row(k)).rowwise().norm();
    for (Index i = 0; i < n; ++i) {
      Index zero_at = -1;
      for (Index k = 0; k < c; ++k)
        if (dist(i, k) == 0.0) {
          zero_at = k;
          break;
        }
      if (zero_at >= 0) {
        res.membership.row(i).setZero();
        res.membership(i, zero_at) = 1.0;
        continue;
      }
      for (Index k = 0; k < c; ++k) {
        double s = 0.0;
        for (Index j = 0; j < c; ++j)
          s += std::pow(dist(i, k) / dist(i, j), power);
        res.membership(i, k) = 1.0 / s;
      }
      res.membership.row(i) /= res.membership.row(i).sum();
    }
    if (moved < params.tol)
      break;
  }
  return res;
}

} // namespace drawres
