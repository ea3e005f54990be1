#ifndef DRAWRES_ANFIS_TUNING_HPP
#define DRAWRES_ANFIS_TUNING_HPP

#include <string>
#include <variant>
#include <vector>

#include "drawres/anfis.hpp"
#include "drawres/optimizers.hpp"

namespace drawres {

/// Per-input statistics that set the premise search box.
struct ColumnStats {
  VectorXd min, max, sd;
  static ColumnStats of(const Ref<const MatrixXd> &X);
};

/// Flattened rule base. Layout: for each rule, for each input, the triple
/// (a, b, c); then for each rule its d coefficients followed by the bias.
struct ParamVector {
  VectorXd values;
  Index rules = 0;
  Index inputs = 0;
  Bounds bounds;

  Index premise_size() const { return rules * inputs * 3; }
  /// e.g. "rule 1 input 0 c" or "rule 0 bias".
  std::string describe(Index k) const;
};

/// Bounds: a in [1e-6, 10 sd], b in [0.5, 5], c in [min - sd, max + sd];
/// consequents in [-1e6, 1e6].
ParamVector flatten(const FuzzyRuleBase &fis, const ColumnStats &stats);

/// Inverse of flatten. Out-of-bounds values are clipped; `clipped` reports it.
/// Throws DomainError when the vector length disagrees with the layout.
FuzzyRuleBase unflatten(const ParamVector &params, bool *clipped = nullptr);

enum class TuningMethod { GA, PSO };

struct TuningResult {
  FuzzyRuleBase fis;
  std::vector<double> history; // best training RMSE per iteration
};

struct TuningOptions {
  /// Consequent search half-width: max(1, |value|) times this.
  double consequent_radius = 1.0;
  /// Starting population members other than the first are the initial rule base
  /// perturbed by N(0, perturbation * width) per element, then clipped.
  double perturbation = 0.02;
  /// Search premises only and solve consequents by least squares for every candidate.
  bool refit_consequents = false;
};

/// Minimizes training RMSE over the rule-base parameters (premises and, unless
/// `refit_consequents` is set, consequents). The first population member is `init`
/// itself, so the result never does worse than it; a zero iteration budget returns
/// `init` unchanged.
TuningResult anfis_metaheuristic_train(const Ref<const MatrixXd> &X, const Ref<const VectorXd> &y,
                                       const FuzzyRuleBase &init,
                                       const std::variant<GaParams, PsoParams> &method,
                                       const TuningOptions &options = {});

} // namespace drawres

#endif // DRAWRES_ANFIS_TUNING_HPP
