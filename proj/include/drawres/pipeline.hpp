#ifndef DRAWRES_PIPELINE_HPP
#define DRAWRES_PIPELINE_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "drawres/changelog.hpp"
#include "drawres/metrics.hpp"
#include "drawres/models.hpp"
#include "drawres/sampling.hpp"
#include "drawres/selection.hpp"
#include "drawres/synth.hpp"

namespace drawres {

struct IngestOptions {
  std::string reference = kCounterId; // grid starts at its first record
  std::string counter = kCounterId;
  std::string target = kTargetId;
  Millis step{2000};
  double counter_max_step = 2000.0;
  double rise_limit = 2000.0;
  /// Columns never offered as candidate features besides the counter and target.
  std::vector<std::string> excluded{kHoursId};
};

struct IngestResult {
  AlignedFrame frame;
  std::vector<ShiftWindow> shifts;
};

/// Aligns every series, cleans the counter column and detects shifts.
IngestResult ingest(const SeriesMap &series, const IngestOptions &options = {});

/// Frame columns usable as features: everything except counter, target and exclusions.
std::vector<std::string> candidate_features(const AlignedFrame &frame,
                                            const IngestOptions &options = {});

/// Rows of every complete (non-truncated) shift, stacked in time order.
SampleSet shift_samples(const IngestResult &data, const std::vector<std::string> &features,
                        const std::string &target);

enum class FeatureSet { Combined, Linear, Nonlinear };

std::string to_string(FeatureSet set);
FeatureSet feature_set_from_string(const std::string &text);

/// direct + potential, direct only, or potential only.
std::vector<std::string> features_of(const FeatureSelection &selection, FeatureSet set);

struct MetricsRow {
  std::string method;
  std::string params;
  std::string features;
  Metrics train;
  Metrics test;
};

/// Table layout: `method,params,features,train_mse,train_rmse,train_r,test_mse,test_rmse,test_r`.
void write_metrics_csv(std::ostream &out, const std::vector<MetricsRow> &rows);

/// Period id (1-based) of each row: rows of one shift are cut into j1 equal
/// consecutive periods.
std::vector<int> period_ids(const std::vector<Instant> &times,
                            const std::vector<ShiftWindow> &shifts, int j1);

} // namespace drawres

#endif // DRAWRES_PIPELINE_HPP
