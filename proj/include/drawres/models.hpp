#ifndef DRAWRES_MODELS_HPP
#define DRAWRES_MODELS_HPP

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "drawres/anfis.hpp"
#include "drawres/anfis_tuning.hpp"
#include "drawres/changelog.hpp"
#include "drawres/clustering.hpp"
#include "drawres/gmdh.hpp"
#include "drawres/mlffnn.hpp"

namespace drawres {

enum class ModelKind { Mlffnn, AnfisSc, AnfisFcm, AnfisGa, AnfisPso, Gmdh };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string &text);

/// Every hyperparameter a model kind may need; unused blocks are ignored.
struct ModelSpec {
  ModelKind kind = ModelKind::AnfisFcm;
  MlffnnParams mlffnn;
  SubtractiveParams subtractive;
  FcmParams fcm;
  HybridOptions hybrid;
  GaParams ga;
  PsoParams pso;
  TuningOptions tuning;
  GmdhParams gmdh;
  std::uint64_t seed = 1;

  /// Short hyperparameter summary, e.g. "NC=2,PME=2" or "N=50,L=7,P=0.6".
  std::string describe() const;
};

using ModelVariant = std::variant<MlffnnModel, AnfisModel, GmdhNetwork>;

struct TrainedModel {
  ModelKind kind = ModelKind::AnfisFcm;
  std::string params;
  std::vector<std::string> features;
  ModelVariant model;

  VectorXd predict(const Ref<const MatrixXd> &X) const;
};

struct TrainOutcome {
  TrainedModel model;
  std::vector<double> history; // per-epoch MSE or per-iteration best RMSE, kind dependent
};

/// Fits the requested model on the sample set's rows. Seeds of the clustering,
/// optimizer and network blocks are derived from `spec.seed`.
TrainOutcome train_model(const SampleSet &train, const ModelSpec &spec);

/// Line-oriented text format: a `drawres-model 1` header, then one record per
/// line, `<key> <count> <values...>`. Numbers use shortest round-trip notation.
void save_model(std::ostream &out, const TrainedModel &model);
TrainedModel load_model(std::istream &in);

} // namespace drawres

#endif // DRAWRES_MODELS_HPP
