#include "drawres/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "drawres/parallel.hpp"

namespace drawres {

namespace {

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
  Index n_left = 0;
};

class TreeBuilder {
public:
  TreeBuilder(const Ref<const MatrixXd> &X, const Ref<const VectorXd> &y, int min_leaf,
              int max_features, std::uint64_t seed)
      : X_(X), y_(y), min_leaf_(std::max(1, min_leaf)), max_features_(max_features), rng_(seed) {}

  RegressionTree build() {
    const Index n = X_.rows();
    std::uniform_int_distribution<Index> pick(0, n - 1);
    std::vector<Index> rows(static_cast<std::size_t>(n));
    for (auto &r : rows)
      r = pick(rng_);
    tree_.importance = VectorXd::Zero(X_.cols());
    grow(rows);
    return std::move(tree_);
  }

private:
  int grow(std::vector<Index> &rows) {
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    double sum = 0.0, sumsq = 0.0;
    for (Index r : rows) {
      sum += y_[r];
      sumsq += y_[r] * y_[r];
    }
    const double n = static_cast<double>(rows.size());
    tree_.nodes[id].value = sum / n;
    const double sse = std::max(0.0, sumsq - sum * sum / n);
    if (rows.size() < 2 * static_cast<std::size_t>(min_leaf_) || sse <= 1e-12 * std::max(1.0, sumsq))
      return id;

    const SplitChoice best = find_split(rows, sum, sse);
    if (best.feature < 0)
      return id;

    auto mid = std::partition(rows.begin(), rows.end(), [&](Index r) {
      return X_(r, best.feature) <= best.threshold;
    });
    std::vector<Index> left(rows.begin(), mid);
    std::vector<Index> right(mid, rows.end());
    rows.clear();
    rows.shrink_to_fit();
    tree_.importance[best.feature] += best.gain;
    const int l = grow(left);
    const int r = grow(right);
    TreeNode &node = tree_.nodes[id];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = l;
    node.right = r;
    return id;
  }

  SplitChoice find_split(const std::vector<Index> &rows, double total_sum, double total_sse) {
    const int d = static_cast<int>(X_.cols());
    int mtry = max_features_ > 0 ? max_features_
                                 : std::max(1, static_cast<int>(std::floor(std::sqrt(double(d)))));
    mtry = std::min(mtry, d);
    std::vector<int> features(static_cast<std::size_t>(d));
    std::iota(features.begin(), features.end(), 0);
    // partial Fisher-Yates: the first mtry entries are the candidates
    for (int i = 0; i < mtry; ++i) {
      std::uniform_int_distribution<int> pick(i, d - 1);
      std::swap(features[i], features[pick(rng_)]);
    }
    features.resize(static_cast<std::size_t>(mtry));
    std::sort(features.begin(), features.end());

    const Index n = static_cast<Index>(rows.size());
    SplitChoice best;
    std::vector<std::pair<double, double>> xs(rows.size());
    for (int f : features) {
      for (std::size_t k = 0; k < rows.size(); ++k)
        xs[k] = {X_(rows[k], f), y_[rows[k]]};
      std::sort(xs.begin(), xs.end(),
                [](const auto &a, const auto &b) { return a.first < b.first; });
      double left_sum = 0.0, left_sq = 0.0, total_sq = 0.0;
      for (const auto &p : xs)
        total_sq += p.second * p.second;
      for (Index k = 0; k + 1 < n; ++k) {
        left_sum += xs[k].second;
        left_sq += xs[k].second * xs[k].second;
        const Index nl = k + 1;
        const Index nr = n - nl;
        if (nl < min_leaf_)
          continue;
        if (nr < min_leaf_)
          break;
        if (xs[k].first == xs[k + 1].first)
          continue;
        const double right_sum = total_sum - left_sum;
        const double right_sq = total_sq - left_sq;
        const double sse_l = left_sq - left_sum * left_sum / double(nl);
        const double sse_r = right_sq - right_sum * right_sum / double(nr);
        const double gain = total_sse - sse_l - sse_r;
        if (gain > best.gain + 1e-12 * total_sse) {
          best.feature = f;
          best.threshold = 0.5 * (xs[k].first + xs[k + 1].first);
          best.gain = gain;
          best.n_left = nl;
        }
      }
    }
    return best;
  }

  const Ref<const MatrixXd> &X_;
  const Ref<const VectorXd> &y_;
  int min_leaf_;
  int max_features_;
  std::mt19937_64 rng_;
  RegressionTree tree_;
};

} // namespace

double RegressionTree::predict(const Ref<const VectorXd> &x) const {
  int id = 0;
  while (nodes[id].feature >= 0)
    id = x[nodes[id].feature] <= nodes[id].threshold ? nodes[id].left : nodes[id].right;
  return nodes[id].value;
}

double Forest::predict_one(const Ref<const VectorXd> &x) const {
  double s = 0.0;
  for (const auto &t : trees)
    s += t.predict(x);
  return s / static_cast<double>(trees.size());
}

VectorXd Forest::predict(const Ref<const MatrixXd> &X) const {
  VectorXd out(X.rows());
  for (Index r = 0; r < X.rows(); ++r)
    out[r] = predict_one(X.row(r).transpose());
  return out;
}

Forest fit_random_forest(const Ref<const MatrixXd> &X, const Ref<const VectorXd> &y,
                         const ForestParams &params) {
  if (X.rows() < 2)
    throw DomainError("fit_random_forest: need at least 2 rows");
  if (X.cols() < 1)
    throw DomainError("fit_random_forest: need at least 1 feature");
  if (X.rows() != y.size())
    throw DomainError("fit_random_forest: row count of X differs from length of y");
  if (params.n_trees < 1)
    throw DomainError("fit_random_forest: n_trees must be >= 1");

  Forest forest;
  forest.n_features = X.cols();
  forest.trees.resize(static_cast<std::size_t>(params.n_trees));
  parallel_for(forest.trees.size(), [&](std::size_t t) {
    TreeBuilder builder(X, y, params.min_leaf, params.max_features,
                        derive_seed(params.seed, t));
    forest.trees[t] = builder.build();
  });
  forest.degenerate = std::all_of(forest.trees.begin(), forest.trees.end(),
                                  [](const RegressionTree &t) { return t.nodes.size() == 1; }) &&
                      (y.array() == y[0]).all();
  return forest;
}

VectorXd rf_importances(const Forest &forest) {
  VectorXd imp = VectorXd::Zero(forest.n_features);
  for (const auto &t : forest.trees)
    imp += t.importance;
  if (!forest.trees.empty())
    imp /= static_cast<double>(forest.trees.size());
  const double total = imp.sum();
  if (total > 0.0)
    imp /= total;
  return imp;
}

} // namespace drawres
