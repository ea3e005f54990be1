#include "drawres/pipeline.hpp"

#include <algorithm>
#include <ostream>

#include "drawres/text.hpp"

namespace drawres {

IngestResult ingest(const SeriesMap &series, const IngestOptions &options) {
  if (!series.count(options.reference))
    throw DomainError("ingest: reference indicator '" + options.reference + "' not in the log");
  if (!series.count(options.counter))
    throw DomainError("ingest: counter indicator '" + options.counter + "' not in the log");
  IngestResult r;
  r.frame = align(series, options.reference, options.step);
  const auto c = *r.frame.column_index(options.counter);
  const VectorXd cleaned = clean_counter(r.frame.values.col(c), options.counter_max_step);
  r.frame.values.col(c) = cleaned;
  r.shifts = detect_shifts(cleaned, r.frame.grid_start, r.frame.step, options.rise_limit);
  return r;
}

std::vector<std::string> candidate_features(const AlignedFrame &frame,
                                            const IngestOptions &options) {
  std::vector<std::string> out;
  for (const auto &n : frame.names) {
    if (n == options.counter || n == options.target || n == options.reference)
      continue;
    if (std::find(options.excluded.begin(), options.excluded.end(), n) != options.excluded.end())
      continue;
    out.push_back(n);
  }
  return out;
}

SampleSet shift_samples(const IngestResult &data, const std::vector<std::string> &features,
                        const std::string &target) {
  std::vector<SampleSet> parts;
  for (const auto &w : data.shifts)
    if (!w.truncated)
      parts.push_back(build_samples(data.frame, w, features, target));
  if (parts.empty())
    throw DomainError("no complete shift found in the data");
  return concat(parts);
}

std::string to_string(FeatureSet set) {
  switch (set) {
  case FeatureSet::Combined:
    return "combined";
  case FeatureSet::Linear:
    return "linear";
  case FeatureSet::Nonlinear:
    return "nonlinear";
  }
  return "?";
}

FeatureSet feature_set_from_string(const std::string &text) {
  if (text == "combined")
    return FeatureSet::Combined;
  if (text == "linear")
    return FeatureSet::Linear;
  if (text == "nonlinear")
    return FeatureSet::Nonlinear;
  throw DomainError("unknown feature set '" + text + "' (expected combined, linear or nonlinear)");
}

std::vector<std::string> features_of(const FeatureSelection &selection, FeatureSet set) {
  std::vector<std::string> out;
  if (set != FeatureSet::Nonlinear)
    out = selection.direct;
  if (set != FeatureSet::Linear)
    out.insert(out.end(), selection.potential.begin(), selection.potential.end());
  return out;
}

void write_metrics_csv(std::ostream &out, const std::vector<MetricsRow> &rows) {
  using text::format_double;
  out << "method,params,features,train_mse,train_rmse,train_r,test_mse,test_rmse,test_r\n";
  for (const auto &r : rows) {
    std::string params = r.params;
    if (params.find(',') != std::string::npos)
      params = '"' + params + '"';
    out << r.method << ',' << params << ',' << r.features << ',' << format_double(r.train.mse)
        << ',' << format_double(r.train.rmse) << ',' << format_double(r.train.r) << ','
        << format_double(r.test.mse) << ',' << format_double(r.test.rmse) << ','
        << format_double(r.test.r) << '\n';
  }
}

std::vector<int> period_ids(const std::vector<Instant> &times,
                            const std::vector<ShiftWindow> &shifts, int j1) {
  if (j1 <= 0)
    throw DomainError("period_ids: j1 must be positive");
  std::vector<int> ids(times.size(), 0);
  for (const auto &w : shifts) {
    const auto lo = std::lower_bound(times.begin(), times.end(), w.start);
    const auto hi = std::lower_bound(times.begin(), times.end(), w.end);
    const auto n = static_cast<long long>(hi - lo);
    for (auto it = lo; it != hi; ++it) {
      const auto k = static_cast<long long>(it - lo);
      ids[static_cast<std::size_t>(it - times.begin())] = static_cast<int>(k * j1 / n) + 1;
    }
  }
  return ids;
}

} // namespace drawres
