#ifndef DRAWRES_SYNTH_HPP
#define DRAWRES_SYNTH_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "drawres/changelog.hpp"
#include "drawres/metrics.hpp"

namespace drawres {

enum class Transform { Square, Threshold, ProductPair };

std::string to_string(Transform t);
Transform transform_from_string(const std::string &text);

struct PlantedDirect {
  std::string indicator;
  double coefficient = 0.0; // Pa per standardized unit
};

/// Square: x^2 - 1. Threshold: max(0, |x| - 0.5) minus its mean.
/// ProductPair: x * partner. Every term has zero mean and no rank correlation
/// with its input for a standard normal input.
struct PlantedPotential {
  std::string indicator;
  Transform transform = Transform::Square;
  double coefficient = 0.0;
  std::string partner; // ProductPair only
};

struct RejectCluster {
  double mu = 50.0;
  double sigma = 1.16;
  int m1 = 60; // per shift
};

/// Names of the special columns emitted next to the group indicators.
inline const std::string kCounterId = "counter";
inline const std::string kHoursId = "hours_worked";
inline const std::string kTargetId = "draw_resistance";

struct SynthConfig {
  std::array<int, 4> group_sizes{7, 20, 30, 25}; // raw, VE, SE, MAX -> A, B, C, D
  std::vector<PlantedDirect> planted_direct;
  std::vector<PlantedPotential> planted_potential;
  double base = 1150.0;
  double noise_sd = 0.0;

  Instant start;                     // first grid point
  std::vector<Instant> shift_starts; // nominal shift starts, increasing
  int periods_per_shift = 100;
  int points_per_period = 50;
  int tail_points = 100; // idle grid points after the last shift
  Millis step{2000};

  RejectCluster reject_cluster;
  SpecLimits limits;

  double change_probability = 0.5; // chance a held indicator value refreshes per step
  double persistence = 0.9;        // AR(1) coefficient of the latent indicator process
  double counter_fault_rate = 0.002; // spikes per idle grid point
  double reset_fault_rate = 0.0005;  // spurious hours-worked resets per shift grid point
  double cigarettes_per_step = 333.0;

  std::uint64_t seed = 1;

  int shift_points() const { return periods_per_shift * points_per_period; }
  /// Group indicator ids in order: A01.., B01.., C01.., D01...
  std::vector<std::string> indicator_ids() const;
  /// Throws DomainError naming the offending field.
  void validate() const;
};

/// Planted-structure recipe used by default_synth_config.
struct PlantedDesign {
  int n_direct = 25;
  double decay = 0.8; // ratio between successive linear coefficients
  int n_square = 2;
  int n_threshold = 2;
  int n_product = 2; // pairs
  // relative variance contributed by one term of each kind
  double square_weight = 4.0;
  double threshold_weight = 2.0;
  double product_weight = 1.0;
  double linear_share = 0.79;
  double nonlinear_share = 0.2;
  double target_sd = 5.0;
};

/// Two shifts (07:00 and 12:30) on 2022-02-07 with planted indicators drawn by `seed`.
SynthConfig default_synth_config(std::uint64_t seed = 1, const PlantedDesign &design = {});

struct GroundTruth {
  VectorXd draw_resistance;      // one value per grid point
  std::vector<bool> reject;      // outside the spec limits, shifts only
  std::vector<int> period_id;    // 1-based inside a shift, 0 while idle
  std::vector<std::string> direct;
  std::vector<std::string> potential;
  std::vector<ShiftWindow> shifts;
  int counter_faults = 0;
  int reset_faults = 0;
};

struct SynthOutput {
  std::vector<LogRecord> records; // change-only, time ordered
  GroundTruth truth;
  AlignedFrame dense; // every emitted indicator at every grid point
};

SynthOutput generate(const SynthConfig &config);

/// Per grid point: `timestamp,draw_resistance,reject,period`.
void write_truth_csv(std::ostream &out, const GroundTruth &truth, const AlignedFrame &dense);
/// `indicator,role,transform,partner,coefficient`.
void write_planted_csv(std::ostream &out, const SynthConfig &config);

} // namespace drawres

#endif // DRAWRES_SYNTH_HPP
