#ifndef DRAWRES_GMDH_HPP
#define DRAWRES_GMDH_HPP

#include <algorithm>
#include <array>
#include <limits>
#include <cstdint>
#include <vector>

#include "drawres/core.hpp"
#include "drawres/scaling.hpp"

namespace drawres {

/// Quadratic two-input neuron:
///   out = k0 + k1 u + k2 v + k3 u^2 + k4 v^2 + k5 u v,
/// where u, v are outputs of the previous layer (raw inputs in layer 1).
struct GmdhNeuron {
  Index u = 0;
  Index v = 0;
  std::array<double, 6> coef{};
  double criterion = 0.0; // selection-part RMSE
  // output range seen on the fitting rows; evaluation clamps to it
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  double eval(double x_u, double x_v) const {
    const double out = coef[0] + coef[1] * x_u + coef[2] * x_v + coef[3] * x_u * x_u +
                       coef[4] * x_v * x_v + coef[5] * x_u * x_v;
    return std::clamp(out, lo, hi);
  }
};

struct GmdhParams {
  int max_neurons = 50;         // N
  int max_layers = 7;           // L
  double pressure = 0.6;        // P
  double fit_fraction = 0.7;    // share of rows used for fitting, the rest select
  bool standardize = true;      // z-score inputs and target first
  std::uint64_t seed = 0;
};

/// Self-organizing polynomial network. After training only ancestors of the best
/// neuron remain, so the final layer holds exactly one neuron.
struct GmdhNetwork {
  std::vector<std::vector<GmdhNeuron>> layers;
  Index inputs = 0;
  GmdhParams config;
  Standardizer input_scaling;   // identity when config.standardize is false
  TargetScaler target_scaling;

  std::size_t depth() const { return layers.size(); }
  VectorXd predict(const Ref<const MatrixXd> &X) const;
  /// Best selection-part RMSE of each layer as it was accepted during training.
  std::vector<double> layer_criteria;
};

/// Least-squares fit of one neuron on the given columns.
GmdhNeuron gmdh_fit_neuron(const Ref<const VectorXd> &u, const Ref<const VectorXd> &v,
                           const Ref<const VectorXd> &y);

/// Rows are split (seeded) into a fitting part and a selection part. Each layer
/// fits every input pair by least squares, ranks candidates by selection RMSE and
/// keeps those within best + P * (worst - best), at most N. Growth stops when a
/// layer fails to improve on the previous best, fewer than two neurons survive,
/// or L layers exist. Throws DomainError for fewer than two features.
GmdhNetwork gmdh_train(const Ref<const MatrixXd> &X, const Ref<const VectorXd> &y,
                       const GmdhParams &params = {});

} // namespace drawres

#endif // DRAWRES_GMDH_HPP
