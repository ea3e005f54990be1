#include "drawres/changelog.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "drawres/parallel.hpp"
#include "drawres/text.hpp"

namespace drawres {

namespace {

void append_record(SeriesMap &out, const LogRecord &r, std::size_t line) {
  auto [it, inserted] = out.try_emplace(r.indicator);
  ChangeLogSeries &s = it->second;
  if (inserted)
    s.indicator_id = r.indicator;
  if (!s.entries.empty()) {
    const auto &last = s.entries.back();
    if (r.time <= last.time) {
      std::string where = line ? "line " + std::to_string(line) + ": " : "";
      throw OrderingError(where + "indicator '" + r.indicator + "' timestamp " +
                          format_instant(r.time) +
                          (r.time == last.time ? " duplicates" : " precedes") +
                          " previous entry " + format_instant(last.time));
    }
    if (r.value == last.value)
      return;
  }
  s.entries.push_back({r.time, r.value});
}

std::vector<std::string> header_fields(std::istream &in, std::size_t &line_no) {
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!text::trim(line).empty()) {
      auto fields = text::split(line);
      for (auto &f : fields)
        f = std::string(text::trim(f));
      return fields;
    }
  }
  return {};
}

} // namespace

SeriesMap parse_change_log(std::span<const LogRecord> records) {
  SeriesMap out;
  for (const auto &r : records)
    append_record(out, r, 0);
  return out;
}

SeriesMap parse_change_log(std::istream &csv) {
  SeriesMap out;
  std::size_t line_no = 0;
  const auto header = header_fields(csv, line_no);
  if (header.empty())
    return out;
  if (header != std::vector<std::string>{"timestamp", "indicator", "value"})
    throw ParseError(line_no, "expected header 'timestamp,indicator,value'");

  std::string line;
  while (std::getline(csv, line)) {
    ++line_no;
    if (text::trim(line).empty())
      continue;
    const auto fields = text::split(line);
    if (fields.size() != 3)
      throw ParseError(line_no, "expected 3 fields, got " + std::to_string(fields.size()));
    LogRecord r;
    try {
      r.time = parse_instant(fields[0]);
    } catch (const ParseError &e) {
      throw ParseError(line_no, e.what() + std::string(" (timestamp)"));
    }
    r.indicator = std::string(text::trim(fields[1]));
    if (r.indicator.empty())
      throw ParseError(line_no, "empty indicator id");
    const auto v = text::parse_double(fields[2]);
    if (!v || !std::isfinite(*v))
      throw ParseError(line_no, "malformed value '" + fields[2] + "'");
    r.value = *v;
    append_record(out, r, line_no);
  }
  return out;
}

void write_change_log_csv(std::ostream &out, std::span<const LogRecord> records) {
  out << "timestamp,indicator,value\n";
  for (const auto &r : records)
    out << format_instant(r.time) << ',' << r.indicator << ',' << text::format_double(r.value)
        << '\n';
}

VectorXd forward_fill(const ChangeLogSeries &series, Instant grid_start, Instant grid_end,
                      Millis step) {
  if (series.entries.empty())
    throw DomainError("forward_fill: series '" + series.indicator_id + "' is empty");
  if (step <= Millis{0})
    throw DomainError("forward_fill: step must be positive");
  if (grid_start < series.entries.front().time)
    throw DomainError("forward_fill: grid start " + format_instant(grid_start) +
                      " precedes first entry of '" + series.indicator_id + "' at " +
                      format_instant(series.entries.front().time));
  if (grid_end < grid_start)
    throw DomainError("forward_fill: grid end precedes grid start");

  const Index n = (grid_end - grid_start) / step + 1;
  VectorXd out(n);
  const auto &e = series.entries;
  std::size_t j = 0;
  for (Index k = 0; k < n; ++k) {
    const Instant t = grid_start + step * k;
    while (j + 1 < e.size() && e[j + 1].time <= t)
      ++j;
    out[k] = e[j].value;
  }
  return out;
}

std::optional<Index> AlignedFrame::column_index(const std::string &name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end())
    return std::nullopt;
  return static_cast<Index>(it - names.begin());
}

Eigen::Block<const MatrixXd, Eigen::Dynamic, 1, true>
AlignedFrame::column(const std::string &name) const {
  const auto idx = column_index(name);
  if (!idx)
    throw DomainError("unknown column '" + name + "'");
  return values.col(*idx);
}

AlignedFrame align(const SeriesMap &series, const std::string &reference, Millis step) {
  const auto ref = series.find(reference);
  if (ref == series.end() || ref->second.entries.empty())
    throw DomainError("align: reference indicator '" + reference + "' has no records");
  AlignedFrame frame;
  frame.step = step;
  frame.grid_start = ref->second.entries.front().time;
  Instant grid_end = frame.grid_start;
  for (const auto &[id, s] : series) {
    frame.names.push_back(id);
    if (!s.entries.empty())
      grid_end = std::max(grid_end, s.entries.back().time);
  }
  const Index n = (grid_end - frame.grid_start) / step + 1;
  frame.values.resize(n, static_cast<Index>(frame.names.size()));
  std::vector<const ChangeLogSeries *> cols;
  for (const auto &[id, s] : series)
    cols.push_back(&s);
  parallel_for(cols.size(), [&](std::size_t c) {
    frame.values.col(static_cast<Index>(c)) =
        forward_fill(*cols[c], frame.grid_start, grid_end, step);
  });
  return frame;
}

void write_frame_csv(std::ostream &out, const AlignedFrame &frame) {
  out << "timestamp";
  for (const auto &n : frame.names)
    out << ',' << n;
  out << '\n';
  for (Index k = 0; k < frame.length(); ++k) {
    out << format_instant(frame.time_at(k));
    for (Index c = 0; c < frame.values.cols(); ++c)
      out << ',' << text::format_double(frame.values(k, c));
    out << '\n';
  }
}

AlignedFrame read_frame_csv(std::istream &in) {
  std::size_t line_no = 0;
  auto header = header_fields(in, line_no);
  if (header.empty() || header.front() != "timestamp")
    throw ParseError(line_no, "expected aligned-frame header starting with 'timestamp'");
  AlignedFrame frame;
  frame.names.assign(header.begin() + 1, header.end());
  std::vector<Instant> times;
  std::vector<double> flat;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty())
      continue;
    const auto fields = text::split(line);
    if (fields.size() != header.size())
      throw ParseError(line_no, "expected " + std::to_string(header.size()) + " fields");
    try {
      times.push_back(parse_instant(fields[0]));
    } catch (const ParseError &e) {
      throw ParseError(line_no, e.what());
    }
    for (std::size_t c = 1; c < fields.size(); ++c) {
      const auto v = text::parse_double(fields[c]);
      if (!v)
        throw ParseError(line_no, "malformed value '" + fields[c] + "'");
      flat.push_back(*v);
    }
  }
  if (times.empty())
    throw ParseError(line_no, "aligned frame has no rows");
  frame.grid_start = times.front();
  frame.step = times.size() > 1 ? Millis{times[1] - times[0]} : Millis{2000};
  for (std::size_t k = 1; k < times.size(); ++k)
    if (times[k] - times[k - 1] != frame.step)
      throw ParseError(0, "aligned frame grid is not uniform at row " + std::to_string(k + 1));
  const auto n = static_cast<Index>(times.size());
  const auto m = static_cast<Index>(frame.names.size());
  frame.values = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                Eigen::RowMajor>>(flat.data(), n, m);
  return frame;
}

VectorXd clean_counter(const Ref<const VectorXd> &values, double max_step) {
  VectorXd out = values;
  for (Index k = 1; k < values.size(); ++k)
    if (values[k] - values[k - 1] > max_step)
      out[k] = 0.0;
  return out;
}

std::string to_string(ShiftLabel label) {
  return label == ShiftLabel::Morning ? "Morning" : "Mid";
}

ShiftLabel shift_label_from_string(const std::string &text) {
  if (text == "Morning")
    return ShiftLabel::Morning;
  if (text == "Mid")
    return ShiftLabel::Mid;
  throw ParseError(0, "unknown shift label '" + text + "'");
}

std::vector<ShiftWindow> detect_shifts(const Ref<const VectorXd> &counter, Instant grid_start,
                                       Millis step, double rise_limit) {
  std::vector<ShiftWindow> out;
  std::optional<Index> open;
  auto label_for = [](Instant t) {
    return hour_of_day(t) < 12 ? ShiftLabel::Morning : ShiftLabel::Mid;
  };
  for (Index k = 0; k < counter.size(); ++k) {
    const double prev = k == 0 ? 0.0 : counter[k - 1];
    const double cur = counter[k];
    if (!open) {
      if (prev == 0.0 && cur > 0.0 && cur <= rise_limit)
        open = k;
    } else if (prev > 0.0 && cur == 0.0) {
      const Instant start = grid_start + step * *open;
      out.push_back({start, grid_start + step * k, label_for(start), false});
      open.reset();
    }
  }
  if (open) {
    const Index last = counter.size() - 1;
    const Instant start = grid_start + step * *open;
    if (last > *open)
      out.push_back({start, grid_start + step * last, label_for(start), true});
  }
  return out;
}

void write_shifts_csv(std::ostream &out, std::span<const ShiftWindow> shifts) {
  out << "start,end,label,truncated\n";
  for (const auto &s : shifts)
    out << format_instant(s.start) << ',' << format_instant(s.end) << ',' << to_string(s.label)
        << ',' << (s.truncated ? 1 : 0) << '\n';
}

std::vector<ShiftWindow> read_shifts_csv(std::istream &in) {
  std::size_t line_no = 0;
  const auto header = header_fields(in, line_no);
  if (header != std::vector<std::string>{"start", "end", "label", "truncated"})
    throw ParseError(line_no, "expected header 'start,end,label,truncated'");
  std::vector<ShiftWindow> out;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty())
      continue;
    const auto f = text::split(line);
    if (f.size() != 4)
      throw ParseError(line_no, "expected 4 fields");
    const std::string flag(text::trim(f[3]));
    if (flag != "0" && flag != "1")
      throw ParseError(line_no, "truncated flag must be 0 or 1");
    try {
      out.push_back({parse_instant(f[0]), parse_instant(f[1]),
                     shift_label_from_string(std::string(text::trim(f[2]))), flag == "1"});
    } catch (const ParseError &e) {
      throw ParseError(line_no, e.what());
    }
  }
  return out;
}

SampleSet build_samples(const AlignedFrame &frame, const ShiftWindow &shift,
                        std::span<const std::string> features, const std::string &target) {
  if (features.empty())
    throw DomainError("build_samples: feature list is empty");
  std::vector<std::string> missing;
  std::vector<Index> cols;
  for (const auto &f : features) {
    const auto idx = frame.column_index(f);
    if (!idx)
      missing.push_back(f);
    else
      cols.push_back(*idx);
  }
  const auto target_idx = frame.column_index(target);
  if (!target_idx)
    missing.push_back(target);
  if (!missing.empty()) {
    std::string list;
    for (const auto &m : missing)
      list += (list.empty() ? "" : ", ") + m;
    throw DomainError("build_samples: missing indicators: " + list);
  }
  if (!(shift.start < shift.end))
    throw DomainError("build_samples: shift start must precede end");
  const Instant frame_end = frame.time_at(frame.length());
  if (shift.start < frame.grid_start || shift.end > frame_end)
    throw DomainError("build_samples: shift lies outside the frame range");

  // first grid index >= start, first grid index >= end
  auto ceil_index = [&](Instant t) {
    const auto off = t - frame.grid_start;
    return static_cast<Index>((off + frame.step - Millis{1}) / frame.step);
  };
  const Index lo = ceil_index(shift.start);
  const Index hi = std::min(ceil_index(shift.end), frame.length());

  SampleSet s;
  s.feature_names.assign(features.begin(), features.end());
  const Index n = std::max<Index>(0, hi - lo);
  s.X.resize(n, static_cast<Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c)
    s.X.col(static_cast<Index>(c)) = frame.values.col(cols[c]).segment(lo, n);
  s.y = frame.values.col(*target_idx).segment(lo, n);
  s.times.reserve(n);
  for (Index k = lo; k < hi; ++k)
    s.times.push_back(frame.time_at(k));
  return s;
}

SampleSet concat(std::span<const SampleSet> parts) {
  SampleSet out;
  if (parts.empty())
    return out;
  out.feature_names = parts.front().feature_names;
  Index rows = 0;
  for (const auto &p : parts) {
    if (p.feature_names != out.feature_names)
      throw DomainError("concat: feature names differ between sample sets");
    rows += p.rows();
  }
  out.X.resize(rows, static_cast<Index>(out.feature_names.size()));
  out.y.resize(rows);
  Index at = 0;
  for (const auto &p : parts) {
    out.X.middleRows(at, p.rows()) = p.X;
    out.y.segment(at, p.rows()) = p.y;
    out.times.insert(out.times.end(), p.times.begin(), p.times.end());
    at += p.rows();
  }
  return out;
}

SampleSet split(SampleSet samples, double train_fraction, std::uint64_t seed, SplitMode mode) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw DomainError("split: train fraction must lie in (0, 1)");
  const Index n = samples.rows();
  if (n < 2)
    throw DomainError("split: need at least 2 rows");
  const Index n_train =
      std::clamp<Index>(static_cast<Index>(std::llround(train_fraction * double(n))), 1, n - 1);
  samples.tags.assign(static_cast<std::size_t>(n), SplitTag::Test);
  if (mode == SplitMode::Chronological) {
    std::fill_n(samples.tags.begin(), n_train, SplitTag::Train);
  } else {
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    for (Index k = 0; k < n_train; ++k)
      samples.tags[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = SplitTag::Train;
  }
  return samples;
}

SampleSet subset(const SampleSet &samples, SplitTag tag) {
  if (samples.tags.size() != static_cast<std::size_t>(samples.rows()))
    throw DomainError("subset: samples have not been split");
  std::vector<Index> rows;
  for (std::size_t k = 0; k < samples.tags.size(); ++k)
    if (samples.tags[k] == tag)
      rows.push_back(static_cast<Index>(k));
  SampleSet out;
  out.feature_names = samples.feature_names;
  out.X = samples.X(rows, Eigen::all);
  out.y = samples.y(rows);
  for (Index r : rows) {
    if (!samples.times.empty())
      out.times.push_back(samples.times[static_cast<std::size_t>(r)]);
    out.tags.push_back(tag);
  }
  return out;
}

SampleSet select_columns(const SampleSet &samples, std::span<const std::string> names) {
  std::vector<Index> cols;
  std::string missing;
  for (const auto &n : names) {
    const auto it = std::find(samples.feature_names.begin(), samples.feature_names.end(), n);
    if (it == samples.feature_names.end())
      missing += (missing.empty() ? "" : ", ") + n;
    else
      cols.push_back(static_cast<Index>(it - samples.feature_names.begin()));
  }
  if (!missing.empty())
    throw DomainError("select_columns: missing features: " + missing);
  SampleSet out = samples;
  out.feature_names.assign(names.begin(), names.end());
  out.X = samples.X(Eigen::all, cols);
  return out;
}

} // namespace drawres
