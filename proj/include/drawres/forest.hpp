#ifndef DRAWRES_FOREST_HPP
#define DRAWRES_FOREST_HPP

#include <cstdint>
#include <vector>

#include "drawres/core.hpp"

namespace drawres {

struct ForestParams {
  int n_trees = 20;
  int min_leaf = 5;     // minimum samples per leaf
  int max_features = 0; // candidate features per split; 0 means floor(sqrt(d))
  std::uint64_t seed = 0;
};

struct TreeNode {
  int feature = -1; // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
};

struct RegressionTree {
  std::vector<TreeNode> nodes; // nodes[0] is the root
  VectorXd importance;         // SSE reduction per feature, summed over this tree's splits

  double predict(const Ref<const VectorXd> &x) const;
};

/// Bagged variance-reduction regression trees.
struct Forest {
  std::vector<RegressionTree> trees;
  Index n_features = 0;
  bool degenerate = false; // constant target: every tree is a single leaf

  double predict_one(const Ref<const VectorXd> &x) const;
  VectorXd predict(const Ref<const MatrixXd> &X) const;
};

/// Deterministic given params.seed; tree t draws from an independent sub-stream.
Forest fit_random_forest(const Ref<const MatrixXd> &X, const Ref<const VectorXd> &y,
                         const ForestParams &params = {});

/// Split impurity reduction per feature, averaged over trees and normalized to
/// sum 1. All zeros when the forest never split.
VectorXd rf_importances(const Forest &forest);

} // namespace drawres

#endif // DRAWRES_FOREST_HPP
