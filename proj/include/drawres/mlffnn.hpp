#ifndef DRAWRES_MLFFNN_HPP
#define DRAWRES_MLFFNN_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "drawres/core.hpp"
#include "drawres/scaling.hpp"

namespace drawres {

enum class MlffnnVariant { GradientDescent, LevenbergMarquardt };

std::string to_string(MlffnnVariant v);
MlffnnVariant mlffnn_variant_from_string(const std::string &text);

/// Three-layer feed-forward network: sigmoid hidden layer, linear output.
/// Weights act on z-scored inputs and targets; predict() works in original units.
struct MlffnnModel {
  MatrixXd w_hidden; // hidden x inputs
  VectorXd b_hidden;
  VectorXd w_out; // hidden
  double b_out = 0.0;
  Standardizer input_scaling;
  TargetScaler target_scaling;

  Index inputs() const { return w_hidden.cols(); }
  Index hidden() const { return w_hidden.rows(); }

  /// Flattened as [w_hidden (row-major), b_hidden, w_out, b_out].
  VectorXd parameters() const;
  void set_parameters(const Ref<const VectorXd> &p);

  /// Output for already-normalized rows, in normalized target units.
  VectorXd forward_normalized(const Ref<const MatrixXd> &Xn) const;
  VectorXd predict(const Ref<const MatrixXd> &X) const;
};

struct MlffnnParams {
  int hidden = 40;
  MlffnnVariant variant = MlffnnVariant::LevenbergMarquardt;
  int max_epochs = 200;
  double learning_rate = 0.1; // gradient descent only
  std::uint64_t seed = 0;
};

/// Mean squared error on normalized data; fills `grad` (same layout as
/// parameters()) when non-null.
double mlffnn_mse(const MlffnnModel &model, const Ref<const MatrixXd> &Xn,
                  const Ref<const VectorXd> &yn, VectorXd *grad = nullptr);

/// Trains on z-scored data. Stops early when the training MSE improves by less
/// than 1e-8 for 10 consecutive epochs. Throws DivergenceError if the MSE becomes
/// non-finite, naming the last finite epoch.
MlffnnModel mlffnn_train(const Ref<const MatrixXd> &X, const Ref<const VectorXd> &y,
                         const MlffnnParams &params = {});

} // namespace drawres

#endif // DRAWRES_MLFFNN_HPP
