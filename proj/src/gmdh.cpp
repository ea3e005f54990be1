#include "drawres/gmdh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "drawres/parallel.hpp"

namespace drawres {

namespace {

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

MatrixXd design(const Ref<const VectorXd> &u, const Ref<const VectorXd> &v) {
  MatrixXd A(u.size(), 6);
  A.col(0).setOnes();
  A.col(1) = u;
  A.col(2) = v;
  A.col(3) = u.array().square();
  A.col(4) = v.array().square();
  A.col(5) = u.cwiseProduct(v);
  return A;
}

VectorXd neuron_output(const GmdhNeuron &nr, const Ref<const VectorXd> &u,
                       const Ref<const VectorXd> &v) {
  const auto &k = nr.coef;
  return (k[0] + k[1] * u.array() + k[2] * v.array() + k[3] * u.array().square() +
          k[4] * v.array().square() + k[5] * u.array() * v.array())
      .max(nr.lo)
      .min(nr.hi)
      .matrix();
}

MatrixXd layer_outputs(const std::vector<GmdhNeuron> &layer, const Ref<const MatrixXd> &Z) {
  MatrixXd out(Z.rows(), static_cast<Index>(layer.size()));
  for (std::size_t k = 0; k < layer.size(); ++k)
    out.col(static_cast<Index>(k)) = neuron_output(layer[k], Z.col(layer[k].u), Z.col(layer[k].v));
  return out;
}

} // namespace

GmdhNeuron gmdh_fit_neuron(const Ref<const VectorXd> &u, const Ref<const VectorXd> &v,
                           const Ref<const VectorXd> &y) {
  const MatrixXd A = design(u, v);
  const Mat6 G = A.transpose() * A;
  const Vec6 rhs = A.transpose() * y;
  Vec6 k;
  Eigen::LDLT<Mat6> ldlt(G);
  if (ldlt.info() == Eigen::Success && ldlt.isPositive() && ldlt.rcond() > 1e-12) {
    k = ldlt.solve(rhs);
  } else {
    Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(A);
    cod.setThreshold(1e-10);
    k = cod.solve(y);
  }
  GmdhNeuron n;
  for (int i = 0; i < 6; ++i)
    n.coef[static_cast<std::size_t>(i)] = k[i];
  return n;
}

VectorXd GmdhNetwork::predict(const Ref<const MatrixXd> &X) const {
  if (X.cols() != inputs)
    throw DomainError("GmdhNetwork: input width differs from training width");
  MatrixXd Z = config.standardize ? input_scaling.transform(X) : MatrixXd(X);
  for (const auto &layer : layers)
    Z = layer_outputs(layer, Z);
  const VectorXd z = Z.col(0);
  return config.standardize ? target_scaling.inverse(z) : z;
}

GmdhNetwork gmdh_train(const Ref<const MatrixXd> &X, const Ref<const VectorXd> &y,
                       const GmdhParams &params) {
  if (X.cols() < 2)
    throw DomainError("gmdh_train: need at least two features to form pairs");
  if (X.rows() != y.size())
    throw DomainError("gmdh_train: row count of X differs from length of y");
  if (params.max_neurons < 1 || params.max_layers < 1)
    throw DomainError("gmdh_train: N and L must be >= 1");
  if (!(params.fit_fraction > 0.0 && params.fit_fraction < 1.0))
    throw DomainError("gmdh_train: fit fraction must lie in (0, 1)");

  GmdhNetwork net;
  net.inputs = X.cols();
  net.config = params;
  MatrixXd Z;
  VectorXd t;
  if (params.standardize) {
    net.input_scaling = Standardizer::fit(X);
    net.target_scaling = TargetScaler::fit(y);
    Z = net.input_scaling.transform(X);
    t = net.target_scaling.transform(y);
  } else {
    net.input_scaling.mean = VectorXd::Zero(X.cols());
    net.input_scaling.scale = VectorXd::Ones(X.cols());
    Z = X;
    t = y;
  }

  const Index n = X.rows();
  Index n_fit = static_cast<Index>(std::llround(params.fit_fraction * double(n)));
  n_fit = std::clamp<Index>(n_fit, std::min<Index>(6, n), n - 1);
  if (n_fit < 1 || n - n_fit < 1)
    throw DomainError("gmdh_train: too few rows for a fit/selection split");
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::mt19937_64 rng(params.seed);
  std::shuffle(order.begin(), order.end(), rng);
  const std::vector<Index> fit_rows(order.begin(), order.begin() + n_fit);
  const std::vector<Index> sel_rows(order.begin() + n_fit, order.end());
  const VectorXd t_fit = t(fit_rows);
  const VectorXd t_sel = t(sel_rows);

  std::vector<std::vector<GmdhNeuron>> layers;
  std::vector<double> criteria;
  MatrixXd current = Z;
  for (int layer = 0; layer < params.max_layers; ++layer) {
    const Index m = current.cols();
    std::vector<std::pair<Index, Index>> pairs;
    for (Index i = 0; i < m; ++i)
      for (Index j = i + 1; j < m; ++j)
        pairs.emplace_back(i, j);
    const MatrixXd fit_part = current(fit_rows, Eigen::all);
    const MatrixXd sel_part = current(sel_rows, Eigen::all);
    std::vector<GmdhNeuron> candidates(pairs.size());
    parallel_for(pairs.size(), [&](std::size_t k) {
      const auto [i, j] = pairs[k];
      GmdhNeuron nr = gmdh_fit_neuron(fit_part.col(i), fit_part.col(j), t_fit);
      nr.u = i;
      nr.v = j;
      const VectorXd fitted = neuron_output(nr, fit_part.col(i), fit_part.col(j));
      nr.lo = fitted.minCoeff();
      nr.hi = fitted.maxCoeff();
      const VectorXd pred = neuron_output(nr, sel_part.col(i), sel_part.col(j));
      const double c = std::sqrt((pred - t_sel).squaredNorm() / double(t_sel.size()));
      nr.criterion = std::isfinite(c) ? c : std::numeric_limits<double>::infinity();
      candidates[k] = nr;
    });
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const GmdhNeuron &a, const GmdhNeuron &b) {
                       return a.criterion < b.criterion;
                     });
    const double best = candidates.front().criterion;
    if (!criteria.empty() && !(best < criteria.back()))
      break;
    double worst = best;
    for (const auto &c : candidates)
      if (std::isfinite(c.criterion))
        worst = std::max(worst, c.criterion);
    const double threshold = best + params.pressure * (worst - best);
    std::vector<GmdhNeuron> kept;
    for (const auto &c : candidates) {
      if (static_cast<int>(kept.size()) >= params.max_neurons)
        break;
      if (c.criterion <= threshold)
        kept.push_back(c);
    }
    current = layer_outputs(kept, current);
    layers.push_back(std::move(kept));
    criteria.push_back(best);
    if (layers.back().size() < 2)
      break;
  }

  // keep only ancestors of the best neuron in the last layer
  std::vector<Index> needed{0};
  for (std::size_t l = layers.size(); l-- > 0;) {
    std::vector<GmdhNeuron> pruned;
    std::vector<Index> parents;
    for (Index k : needed) {
      GmdhNeuron nr = layers[l][static_cast<std::size_t>(k)];
      for (Index *p : {&nr.u, &nr.v}) {
        auto it = std::find(parents.begin(), parents.end(), *p);
        if (it == parents.end()) {
          parents.push_back(*p);
          *p = static_cast<Index>(parents.size() - 1);
        } else {
          *p = static_cast<Index>(it - parents.begin());
        }
      }
      pruned.push_back(nr);
    }
    layers[l] = std::move(pruned);
    if (l > 0) {
      needed = parents;
    } else {
      // layer 1 reads raw inputs: restore original column indices
      for (auto &nr : layers[0]) {
        nr.u = parents[static_cast<std::size_t>(nr.u)];
        nr.v = parents[static_cast<std::size_t>(nr.v)];
      }
    }
  }
  net.layers = std::move(layers);
  net.layer_criteria = std::move(criteria);
  return net;
}

} // namespace drawres
