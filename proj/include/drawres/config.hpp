#ifndef DRAWRES_CONFIG_HPP
#define DRAWRES_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "drawres/pipeline.hpp"

namespace drawres {

/// Overrides applied on top of default_synth_config.
struct SynthSettings {
  PlantedDesign design;
  int periods_per_shift = 100;
  int points_per_period = 50;
  int tail_points = 100;
  RejectCluster reject_cluster;
  double change_probability = 0.5;
  double persistence = 0.9;
  double counter_fault_rate = 0.002;
  double reset_fault_rate = 0.0005;
  double cigarettes_per_step = 333.0;
};

/// Optional fixed reject distribution; when m1 and sigma are set, sample-plan
/// needs no upstream flags.
struct SamplingOverride {
  std::optional<double> m1;
  std::optional<double> mu;
  std::optional<double> sigma;
};

struct RunConfig {
  std::optional<std::filesystem::path> changelog; // input.changelog
  bool synth = false;                             // input.synth
  SynthSettings synth_settings;

  IngestOptions ingest;
  double train_fraction = 0.85;
  SplitMode split_mode = SplitMode::Chronological;

  double f_lin = 0.30;
  double f_nonlin = 0.24;
  FeatureSet feature_set = FeatureSet::Combined;
  ForestParams forest;

  ModelSpec model;
  SpecLimits limits;
  SamplingPlanConfig sampling;
  SamplingOverride sampling_override;

  std::uint64_t seed = 1;
  std::filesystem::path output_dir = "out";

  /// Throws DomainError naming the offending key.
  void validate() const;
  /// Synthetic-line settings resolved against `seed` and `limits`.
  SynthConfig synth_config() const;
};

/// Thrown for unknown keys and invalid values; `key()` is the dotted path.
class ConfigError : public Error {
public:
  ConfigError(std::string key, const std::string &what)
      : Error(key + ": " + what), key_(std::move(key)) {}
  const std::string &key() const { return key_; }

private:
  std::string key_;
};

/// Reads `key = value` lines. `#` starts a comment; lists are comma separated.
/// Later assignments override earlier ones. Relative input paths resolve against
/// `base_dir`.
RunConfig parse_config(std::istream &in, const std::filesystem::path &base_dir = {});
RunConfig load_config(const std::filesystem::path &path);

/// Sets one key from its text form, as a config line would.
void set_config_value(RunConfig &config, const std::string &key, const std::string &value);

/// Every key with its effective value, one `key = value` line each, in fixed order.
std::string canonical_text(const RunConfig &config);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t hash = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

} // namespace drawres

#endif // DRAWRES_CONFIG_HPP
