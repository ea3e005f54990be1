#include "drawres/app.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include "drawres/charts.hpp"
#include "drawres/text.hpp"

namespace drawres {

namespace fs = std::filesystem;

namespace {

using text::format_double;

const std::string kChangelog = "changelog.csv";
const std::string kTruth = "ground_truth.csv";
const std::string kPlanted = "planted.csv";
const std::string kAligned = "aligned.csv";
const std::string kShifts = "shifts.csv";
const std::string kScores = "feature_scores.csv";
const std::string kModel = "model.txt";
const std::string kTrainMetrics = "train_metrics.csv";
const std::string kHistory = "train_history.csv";
const std::string kConvergence = "convergence.svg";
const std::string kMetrics = "metrics.csv";
const std::string kPrediction = "prediction.svg";
const std::string kFlags = "flags.csv";
const std::string kReport = "sampling_report.csv";
const std::string kReportText = "sampling_report.txt";
const std::string kHistogram = "reject_histogram.svg";
const std::string kManifest = "manifest.txt";

// sub-stream ids passed to derive_seed
enum : std::uint64_t { kSplitStream = 3, kForestStream = 4, kModelStream = 5 };

class Workspace {
public:
  Workspace(const RunConfig &config, std::ostream &log) : config_(config), log_(log) {
    fs::create_directories(config.output_dir);
  }

  fs::path path(const std::string &name) const { return config_.output_dir / name; }

  std::ifstream open(const std::string &name, const std::string &producer) const {
    std::ifstream in(path(name), std::ios::binary);
    if (!in)
      throw Error("missing upstream artifact " + path(name).string() + ": run the '" + producer +
                  "' subcommand first");
    return in;
  }

  void write(const std::string &name, const std::function<void(std::ostream &)> &emit) const {
    std::ostringstream buffer;
    emit(buffer);
    std::ofstream out(path(name), std::ios::binary | std::ios::trunc);
    out << buffer.str();
    if (!out)
      throw Error("cannot write " + path(name).string());
    log_ << "  wrote " << path(name).string() << '\n';
  }

  const RunConfig &config() const { return config_; }
  std::ostream &log() const { return log_; }

private:
  const RunConfig &config_;
  std::ostream &log_;
};

IngestResult load_ingested(const Workspace &ws) {
  IngestResult data;
  {
    auto in = ws.open(kAligned, "ingest");
    data.frame = read_frame_csv(in);
  }
  auto in = ws.open(kShifts, "ingest");
  data.shifts = read_shifts_csv(in);
  return data;
}

FeatureSelection load_selection(const Workspace &ws) {
  auto in = ws.open(kScores, "features");
  FeatureScores scores;
  FeatureSelection selection;
  read_scores_csv(in, scores, selection);
  return selection;
}

TrainedModel load_trained(const Workspace &ws) {
  auto in = ws.open(kModel, "train");
  return load_model(in);
}

SampleSet split_samples(const RunConfig &c, const IngestResult &data,
                        const std::vector<std::string> &features) {
  return split(shift_samples(data, features, c.ingest.target), c.train_fraction,
               derive_seed(c.seed, kSplitStream), c.split_mode);
}

void check_metrics(const Metrics &m, const std::string &what) {
  if (!(std::abs(m.rmse - std::sqrt(m.mse)) <= 1e-9 * std::max(1.0, m.rmse)))
    throw Error("self-check failed: RMSE differs from sqrt(MSE) for " + what);
}

void check_rule_weights(const TrainedModel &model, const Ref<const MatrixXd> &X) {
  const auto *anfis = std::get_if<AnfisModel>(&model.model);
  if (!anfis || X.rows() == 0)
    return;
  const Index rows = std::min<Index>(X.rows(), 200);
  const MatrixXd W =
      anfis_normalized_strengths(anfis->fis, anfis->input_scaling.transform(X.topRows(rows)));
  const double worst = (W.rowwise().sum().array() - 1.0).abs().maxCoeff();
  if (!(worst <= 1e-9))
    throw Error("self-check failed: normalized rule strengths do not sum to 1");
}

ChartSeries thin(ChartSeries s, std::size_t max_points) {
  if (s.x.size() <= max_points)
    return s;
  const std::size_t stride = (s.x.size() + max_points - 1) / max_points;
  ChartSeries out{s.label, {}, {}, s.color};
  for (std::size_t i = 0; i < s.x.size(); i += stride) {
    out.x.push_back(s.x[i]);
    out.y.push_back(s.y[i]);
  }
  return out;
}

void do_synth(const Workspace &ws) {
  const auto &c = ws.config();
  if (!c.synth)
    throw Error("synth: the config reads input.changelog; set input.synth = true to generate data");
  const SynthOutput gen = generate(c.synth_config());
  ws.write(kChangelog, [&](std::ostream &o) { write_change_log_csv(o, gen.records); });
  ws.write(kTruth, [&](std::ostream &o) { write_truth_csv(o, gen.truth, gen.dense); });
  ws.write(kPlanted, [&](std::ostream &o) { write_planted_csv(o, c.synth_config()); });
}

void do_ingest(const Workspace &ws) {
  const auto &c = ws.config();
  SeriesMap series;
  if (c.changelog) {
    std::ifstream in(*c.changelog, std::ios::binary);
    if (!in)
      throw Error("cannot open input.changelog " + c.changelog->string());
    series = parse_change_log(in);
  } else {
    auto in = ws.open(kChangelog, "synth");
    series = parse_change_log(in);
  }
  const IngestResult data = ingest(series, c.ingest);
  ws.log() << "  " << data.frame.names.size() << " indicators, " << data.frame.length()
           << " grid points, " << data.shifts.size() << " shifts\n";
  ws.write(kAligned, [&](std::ostream &o) { write_frame_csv(o, data.frame); });
  ws.write(kShifts, [&](std::ostream &o) { write_shifts_csv(o, data.shifts); });
}

void do_features(const Workspace &ws) {
  const auto &c = ws.config();
  const IngestResult data = load_ingested(ws);
  const auto candidates = candidate_features(data.frame, c.ingest);
  const SampleSet train = subset(split_samples(c, data, candidates), SplitTag::Train);
  ForestParams forest = c.forest;
  forest.seed = derive_seed(c.seed, kForestStream);
  const FeatureScores scores = score_features(train.X, train.y, train.feature_names, forest);
  const FeatureSelection selection = select(scores, c.f_lin, c.f_nonlin);
  ws.log() << "  " << candidates.size() << " candidates, " << selection.direct.size()
           << " direct, " << selection.potential.size() << " potential\n";
  ws.write(kScores, [&](std::ostream &o) { write_scores_csv(o, scores, selection); });
}

void do_train(const Workspace &ws) {
  const auto &c = ws.config();
  const IngestResult data = load_ingested(ws);
  const auto features = features_of(load_selection(ws), c.feature_set);
  if (features.empty())
    throw Error("train: the selected feature set '" + to_string(c.feature_set) + "' is empty");
  const SampleSet train = subset(split_samples(c, data, features), SplitTag::Train);
  ModelSpec spec = c.model;
  spec.seed = derive_seed(c.seed, kModelStream);
  const TrainOutcome outcome = train_model(train, spec);
  const Metrics m = evaluate(outcome.model.predict(train.X), train.y);
  check_metrics(m, "training rows");
  check_rule_weights(outcome.model, train.X);
  ws.log() << "  " << to_string(spec.kind) << " on " << features.size()
           << " features, train R " << text::format_fixed(m.r, 4) << '\n';
  ws.write(kModel, [&](std::ostream &o) { save_model(o, outcome.model); });
  ws.write(kTrainMetrics, [&](std::ostream &o) {
    o << "method,params,features,rows,mse,rmse,r\n";
    std::string params = outcome.model.params;
    if (params.find(',') != std::string::npos)
      params = '"' + params + '"';
    o << to_string(spec.kind) << ',' << params << ',' << to_string(c.feature_set) << ','
      << train.rows() << ',' << format_double(m.mse) << ',' << format_double(m.rmse) << ','
      << format_double(m.r) << '\n';
  });
  ws.write(kHistory, [&](std::ostream &o) { write_history_csv(o, outcome.history); });
  ws.write(kConvergence, [&](std::ostream &o) {
    ChartSeries s{"training error", {}, outcome.history, "#d62728"};
    for (std::size_t k = 0; k < outcome.history.size(); ++k)
      s.x.push_back(double(k + 1));
    write_line_chart(o, {"Training convergence (" + to_string(spec.kind) + ")", "iteration",
                         "error"},
                     {s});
  });
}

void do_evaluate(const Workspace &ws) {
  const auto &c = ws.config();
  const IngestResult data = load_ingested(ws);
  const TrainedModel model = load_trained(ws);
  const SampleSet all = split_samples(c, data, model.features);
  const SampleSet train = subset(all, SplitTag::Train), test = subset(all, SplitTag::Test);
  const VectorXd test_pred = model.predict(test.X);
  MetricsRow row{to_string(model.kind), model.params, to_string(c.feature_set),
                 evaluate(model.predict(train.X), train.y), evaluate(test_pred, test.y)};
  check_metrics(row.train, "training rows");
  check_metrics(row.test, "test rows");
  check_rule_weights(model, test.X);
  ws.log() << "  test MSE " << text::format_fixed(row.test.mse, 4) << ", RMSE "
           << text::format_fixed(row.test.rmse, 4) << ", R " << text::format_fixed(row.test.r, 4)
           << '\n';
  ws.write(kMetrics, [&](std::ostream &o) { write_metrics_csv(o, {row}); });
  ws.write(kPrediction, [&](std::ostream &o) {
    ChartSeries actual{"actual", {}, {}, "#7f7f7f"}, predicted{"predicted", {}, {}, "#1f77b4"};
    for (Index i = 0; i < test.rows(); ++i) {
      actual.x.push_back(double(i));
      actual.y.push_back(test.y[i]);
      predicted.x.push_back(double(i));
      predicted.y.push_back(test_pred[i]);
    }
    write_line_chart(o, {"Draw resistance on test rows", "test row", "Pa"},
                     {thin(actual, 1500), thin(predicted, 1500)});
  });
}

void do_flag(const Workspace &ws) {
  const auto &c = ws.config();
  const IngestResult data = load_ingested(ws);
  const TrainedModel model = load_trained(ws);
  const SampleSet rows = shift_samples(data, model.features, c.ingest.target);
  const VectorXd pred = model.predict(rows.X);
  const auto mask = flag_substandard(pred, c.limits);
  const auto periods = period_ids(rows.times, data.shifts, c.sampling.j1);
  std::vector<int> shift_of(rows.times.size(), 0);
  for (std::size_t s = 0; s < data.shifts.size(); ++s)
    for (std::size_t i = 0; i < rows.times.size(); ++i)
      if (rows.times[i] >= data.shifts[s].start && rows.times[i] < data.shifts[s].end)
        shift_of[i] = static_cast<int>(s) + 1;
  std::size_t flagged = 0;
  for (bool b : mask)
    flagged += b;
  ws.log() << "  " << flagged << " of " << mask.size() << " points outside ["
           << format_double(c.limits.lower()) << ", " << format_double(c.limits.upper()) << "]\n";
  ws.write(kFlags, [&](std::ostream &o) {
    o << "timestamp,shift,period,predicted,actual,flagged\n";
    for (std::size_t i = 0; i < mask.size(); ++i)
      o << format_instant(rows.times[i]) << ',' << shift_of[i] << ',' << periods[i] << ','
        << format_double(pred[Index(i)]) << ',' << format_double(rows.y[Index(i)]) << ','
        << (mask[i] ? 1 : 0) << '\n';
  });
}

struct FlagRows {
  std::vector<int> shift, period;
  std::vector<bool> flagged;
};

FlagRows read_flags(std::istream &in) {
  FlagRows f;
  std::string line;
  std::size_t number = 1;
  if (!std::getline(in, line) || text::trim(line) != "timestamp,shift,period,predicted,actual,flagged")
    throw ParseError(1, "flags: unexpected header");
  while (std::getline(in, line)) {
    ++number;
    if (text::trim(line).empty())
      continue;
    const auto cells = text::split(line, ',');
    if (cells.size() != 6)
      throw ParseError(number, "flags: expected 6 fields");
    const auto s = text::parse_double(cells[1]), p = text::parse_double(cells[2]),
               g = text::parse_double(cells[5]);
    if (!s || !p || !g)
      throw ParseError(number, "flags: malformed number");
    f.shift.push_back(static_cast<int>(*s));
    f.period.push_back(static_cast<int>(*p));
    f.flagged.push_back(*g != 0.0);
  }
  return f;
}

void do_sample_plan(const Workspace &ws) {
  const auto &c = ws.config();
  std::vector<SamplingReport> reports;
  std::vector<SubstandardDistribution> fitted;
  const auto &o = c.sampling_override;
  if (o.m1 && o.sigma) {
    const double mu = o.mu.value_or((c.sampling.j1 + 1) / 2.0);
    SamplingReport r = make_report(c.sampling, *o.m1, mu, *o.sigma);
    r.label = "config";
    reports.push_back(r);
  } else {
    auto in = ws.open(kFlags, "flag");
    const FlagRows rows = read_flags(in);
    std::map<int, std::pair<std::vector<bool>, std::vector<int>>> per_shift;
    for (std::size_t i = 0; i < rows.flagged.size(); ++i) {
      if (rows.shift[i] <= 0)
        continue;
      auto &[mask, ids] = per_shift[rows.shift[i]];
      mask.push_back(rows.flagged[i]);
      ids.push_back(rows.period[i]);
    }
    for (const auto &[shift, columns] : per_shift) {
      auto dist = period_histogram(columns.first, columns.second, c.sampling.j1, c.sampling.y_s);
      if (dist.m1 < 2) {
        ws.log() << "  shift " << shift << ": " << dist.m1
                 << " flagged points, too few to fit a distribution; skipped\n";
        continue;
      }
      dist = fit_normal(dist);
      SamplingReport r = make_report(c.sampling, dist.m1, dist.mu, dist.sigma);
      r.label = "shift" + std::to_string(shift);
      reports.push_back(r);
      fitted.push_back(dist);
    }
    if (reports.empty())
      throw Error("sample-plan: no shift has at least two flagged points to fit");
  }
  for (const auto &r : reports) {
    const double gap = r.delta_p - (r.p_new - r.p_old);
    if (!(std::abs(gap) <= 1e-12))
      throw Error("self-check failed: delta_P differs from P_new - P_old");
  }
  ws.write(kReport, [&](std::ostream &out) { write_report_csv(out, reports); });
  ws.write(kReportText, [&](std::ostream &out) {
    for (std::size_t k = 0; k < reports.size(); ++k) {
      if (k)
        out << '\n';
      write_report_text(out, reports[k]);
    }
  });
  ws.write(kHistogram, [&](std::ostream &out) {
    std::vector<double> x, h;
    ChartSeries curve{"fitted normal", {}, {}, "#d62728"};
    if (!fitted.empty()) {
      const auto &d = fitted.front();
      for (int id = 1; id <= d.j1; ++id) {
        x.push_back(id);
        h.push_back(d.counts[std::size_t(id - 1)]);
      }
      for (int k = 0; k <= 20 * d.j1; ++k) {
        const double t = 1.0 + (d.j1 - 1.0) * k / (20.0 * d.j1);
        const double z = (t - d.mu) / d.sigma;
        curve.x.push_back(t);
        curve.y.push_back(d.m1 * std::exp(-0.5 * z * z) / (d.sigma * std::sqrt(2.0 * std::numbers::pi)));
      }
    } else {
      const auto &r = reports.front();
      for (int k = 0; k <= 2000; ++k) {
        const double t = 1.0 + (c.sampling.j1 - 1.0) * k / 2000.0;
        const double z = (t - r.mu) / r.sigma;
        curve.x.push_back(t);
        curve.y.push_back(r.m1 * std::exp(-0.5 * z * z) / (r.sigma * std::sqrt(2.0 * std::numbers::pi)));
      }
    }
    write_bar_chart(out, {"Rejects per period (" + reports.front().label + ")", "period id", "rejects"}, x, h,
                    {curve});
  });
}

std::string file_digest(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return hex64(fnv1a(buf.str()));
}

void write_manifest(const Workspace &ws) {
  const auto &c = ws.config();
  ws.write(kManifest, [&](std::ostream &o) {
    o << "config_hash " << hex64(fnv1a(canonical_text(c))) << '\n';
    o << "seed " << c.seed << '\n';
    for (const auto &name : artifact_names())
      if (fs::exists(ws.path(name)))
        o << "artifact " << name << ' ' << file_digest(ws.path(name)) << '\n';
  });
}

} // namespace

const std::vector<std::string> &subcommands() {
  static const std::vector<std::string> names = {"synth", "ingest", "features", "train",
                                                 "evaluate", "flag", "sample-plan"};
  return names;
}

const std::vector<std::string> &artifact_names() {
  static const std::vector<std::string> names = {
      kChangelog, kTruth,   kPlanted,    kAligned, kShifts, kScores,     kModel,
      kTrainMetrics, kHistory, kConvergence, kMetrics, kPrediction, kFlags, kReport,
      kReportText, kHistogram};
  return names;
}

void run_subcommand(const std::string &name, const RunConfig &config, std::ostream &log) {
  config.validate();
  const Workspace ws(config, log);
  static const std::map<std::string, void (*)(const Workspace &)> table = {
      {"synth", do_synth},       {"ingest", do_ingest}, {"features", do_features},
      {"train", do_train},       {"evaluate", do_evaluate}, {"flag", do_flag},
      {"sample-plan", do_sample_plan}};
  if (name == "pipeline") {
    for (const auto &step : subcommands()) {
      if (step == "synth" && !config.synth)
        continue;
      log << step << '\n';
      table.at(step)(ws);
    }
  } else {
    const auto it = table.find(name);
    if (it == table.end())
      throw Error("unknown subcommand '" + name + "'");
    log << name << '\n';
    it->second(ws);
  }
  write_manifest(ws);
}

} // namespace drawres
