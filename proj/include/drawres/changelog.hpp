#ifndef DRAWRES_CHANGELOG_HPP
#define DRAWRES_CHANGELOG_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "drawres/core.hpp"

namespace drawres {

struct LogRecord {
  Instant time;
  std::string indicator;
  double value = 0.0;
  bool operator==(const LogRecord &) const = default;
};

struct ChangeLogEntry {
  Instant time;
  double value = 0.0;
  bool operator==(const ChangeLogEntry &) const = default;
};

/// One indicator's change-only record stream: strictly increasing timestamps,
/// consecutive values differ.
struct ChangeLogSeries {
  std::string indicator_id;
  std::vector<ChangeLogEntry> entries;
  bool operator==(const ChangeLogSeries &) const = default;
};

using SeriesMap = std::map<std::string, ChangeLogSeries>;

/// Groups records per indicator. Records of different indicators may interleave
/// arbitrarily; within one indicator timestamps must increase. A record repeating
/// the previous value of its indicator carries no change and is dropped.
/// Throws OrderingError on a decreasing or duplicate timestamp.
SeriesMap parse_change_log(std::span<const LogRecord> records);

/// Same, reading CSV text with header `timestamp,indicator,value`. Malformed rows
/// raise ParseError naming the 1-based line number.
SeriesMap parse_change_log(std::istream &csv);

void write_change_log_csv(std::ostream &out, std::span<const LogRecord> records);

/// Value of the latest entry at or before each grid point in [grid_start, grid_end].
/// Output length is floor((grid_end - grid_start) / step) + 1. No back-fill: throws
/// DomainError when grid_start precedes the first entry.
VectorXd forward_fill(const ChangeLogSeries &series, Instant grid_start, Instant grid_end,
                      Millis step);

/// All indicators resampled onto one uniform grid.
struct AlignedFrame {
  Instant grid_start;
  Millis step{2000};
  std::vector<std::string> names;
  MatrixXd values; // length() x names.size(), column-major

  Index length() const { return values.rows(); }
  Instant time_at(Index k) const { return grid_start + step * k; }
  std::optional<Index> column_index(const std::string &name) const;
  /// Throws DomainError for an unknown column.
  Eigen::Block<const MatrixXd, Eigen::Dynamic, 1, true> column(const std::string &name) const;
};

/// Fills every series onto a grid starting at the first record of `reference` and
/// ending at the latest record of any indicator. Columns are ordered by indicator id.
AlignedFrame align(const SeriesMap &series, const std::string &reference,
                   Millis step = Millis{2000});

void write_frame_csv(std::ostream &out, const AlignedFrame &frame);
AlignedFrame read_frame_csv(std::istream &in);

/// Replaces each value whose rise over the previous grid point exceeds `max_step`
/// with 0.
VectorXd clean_counter(const Ref<const VectorXd> &values, double max_step = 2000.0);

enum class ShiftLabel { Morning, Mid };

std::string to_string(ShiftLabel label);
ShiftLabel shift_label_from_string(const std::string &text);

/// Half-open production window [start, end).
struct ShiftWindow {
  Instant start;
  Instant end;
  ShiftLabel label = ShiftLabel::Morning;
  bool truncated = false;
  bool operator==(const ShiftWindow &) const = default;
};

/// Opens a window where the cleaned counter rises from 0 into (0, rise_limit] and
/// closes it where the counter drops from a positive value to 0. A window still
/// open at the end of the data closes at the last grid point and is flagged
/// truncated. Labels follow the local start hour (< 12 is Morning).
std::vector<ShiftWindow> detect_shifts(const Ref<const VectorXd> &counter, Instant grid_start,
                                       Millis step, double rise_limit = 2000.0);

void write_shifts_csv(std::ostream &out, std::span<const ShiftWindow> shifts);
std::vector<ShiftWindow> read_shifts_csv(std::istream &in);

enum class SplitTag : std::uint8_t { Train, Test };

/// Model-ready samples: one row per grid instant.
struct SampleSet {
  std::vector<std::string> feature_names;
  MatrixXd X;
  VectorXd y;
  std::vector<Instant> times;
  std::vector<SplitTag> tags; // empty until split()

  Index rows() const { return X.rows(); }
  Index cols() const { return X.cols(); }
};

/// Rows for every grid point inside the shift (window size 1, no lags).
/// Throws DomainError listing missing indicators, or when `features` is empty.
SampleSet build_samples(const AlignedFrame &frame, const ShiftWindow &shift,
                        std::span<const std::string> features, const std::string &target);

/// Stacks sample sets with identical feature names; tags are dropped.
SampleSet concat(std::span<const SampleSet> parts);

enum class SplitMode { Chronological, Random };

/// Tags round(train_fraction * n) rows as train. Chronological puts the last rows
/// (in time order) in the test set; Random shuffles with `seed`.
SampleSet split(SampleSet samples, double train_fraction = 0.85, std::uint64_t seed = 0,
                SplitMode mode = SplitMode::Chronological);

/// Rows carrying `tag`, in their original order.
SampleSet subset(const SampleSet &samples, SplitTag tag);

/// Restricts the feature columns to `names` (in that order).
SampleSet select_columns(const SampleSet &samples, std::span<const std::string> names);

} // namespace drawres

#endif // DRAWRES_CHANGELOG_HPP
