#ifndef DRAWRES_SELECTION_HPP
#define DRAWRES_SELECTION_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "drawres/core.hpp"
#include "drawres/forest.hpp"

namespace drawres {

struct FeatureScores {
  std::vector<std::string> names;
  VectorXd spearman_abs;  // |rho| with the target, in [0, 1]
  VectorXd rf_importance; // sums to 1, or all zero
};

struct FeatureSelection {
  std::vector<std::string> direct;    // linear (rank) association
  std::vector<std::string> potential; // nonlinear association, disjoint from direct
  double f_lin = 0.30;
  double f_nonlin = 0.24;
};

/// |Spearman rho| per column (0 for a constant column) and forest importances.
FeatureScores score_features(const Ref<const MatrixXd> &X, const Ref<const VectorXd> &y,
                             const std::vector<std::string> &names,
                             const ForestParams &forest = {});

/// Two-stage selection: the top ceil(f_lin * N) indicators by spearman_abs become
/// direct; the top ceil(f_nonlin * (N - |direct|)) of the rest by rf_importance
/// become potential. Ties break by indicator id.
FeatureSelection select(const FeatureScores &scores, double f_lin = 0.30,
                        double f_nonlin = 0.24);

/// CSV `indicator,spearman_abs,rf_importance,selected_as`.
void write_scores_csv(std::ostream &out, const FeatureScores &scores,
                      const FeatureSelection &selection);

/// Reads the CSV above back into scores and selection (fractions are not stored).
void read_scores_csv(std::istream &in, FeatureScores &scores, FeatureSelection &selection);

} // namespace drawres

#endif // DRAWRES_SELECTION_HPP
