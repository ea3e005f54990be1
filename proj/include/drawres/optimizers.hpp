#ifndef DRAWRES_OPTIMIZERS_HPP
#define DRAWRES_OPTIMIZERS_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "drawres/core.hpp"

namespace drawres {

using Objective = std::function<double(const VectorXd &)>;

/// Box constraints, one interval per dimension.
struct Bounds {
  VectorXd lo;
  VectorXd hi;

  Index dims() const { return lo.size(); }
  VectorXd clip(const VectorXd &v) const { return v.cwiseMax(lo).cwiseMin(hi); }
  static Bounds uniform(Index dims, double lo, double hi) {
    return {VectorXd::Constant(dims, lo), VectorXd::Constant(dims, hi)};
  }
};

struct OptimResult {
  VectorXd best;
  double best_value = 0.0;
  std::vector<double> history; // best value after each iteration
};

struct GaParams {
  int population = 50;
  int max_iters = 2000;
  double crossover_fraction = 0.3;
  double mutation_fraction = 0.6; // share of non-elite individuals mutated
  double mutation_rate = 0.1;     // per-gene mutation probability
  double mutation_scale = 0.1;    // Gaussian step sd as a fraction of bound width
  double blend_alpha = 0.4;       // blend crossover extension
  std::uint64_t seed = 0;
};

struct PsoParams {
  int population = 50;
  int max_iters = 2000;
  double inertia = 0.9;
  double personal = 0.9;
  double global = 1.8;
  double velocity_clamp = 0.2; // fraction of bound width
  std::uint64_t seed = 0;
};

/// Real-coded GA with tournament-3 selection, blend crossover, per-gene Gaussian
/// mutation and one elite. Non-finite objective values rank last. `initial` rows
/// (if any) replace the first members of the random starting population.
OptimResult ga_minimize(const Objective &objective, const Bounds &bounds, const GaParams &params,
                        const std::vector<VectorXd> &initial = {});

/// Global-best PSO with velocities clamped per dimension.
OptimResult pso_minimize(const Objective &objective, const Bounds &bounds,
                         const PsoParams &params, const std::vector<VectorXd> &initial = {},
                         const std::vector<VectorXd> &initial_velocity = {});

/// CSV `iter,best_value`, iterations counted from 1.
void write_history_csv(std::ostream &out, const std::vector<double> &history);

} // namespace drawres

#endif // DRAWRES_OPTIMIZERS_HPP
