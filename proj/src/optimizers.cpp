#include "drawres/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>

#include "drawres/parallel.hpp"
#include "drawres/text.hpp"

namespace drawres {

namespace {

double safe_eval(const Objective &f, const VectorXd &x) {
  const double v = f(x);
  return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

void check_bounds(const Bounds &b) {
  if (b.dims() < 1 || b.hi.size() != b.lo.size())
    throw DomainError("optimizer: bounds need matching lo/hi with at least one dimension");
  if ((b.hi.array() < b.lo.array()).any())
    throw DomainError("optimizer: bound with hi < lo");
}

std::vector<VectorXd> starting_population(const Bounds &b, int n, std::mt19937_64 &rng,
                                          const std::vector<VectorXd> &initial) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<VectorXd> pop(static_cast<std::size_t>(n));
  for (auto &p : pop)
    p = b.lo + (b.hi - b.lo).cwiseProduct(
                   VectorXd::NullaryExpr(b.dims(), [&] { return unit(rng); }));
  for (std::size_t k = 0; k < initial.size() && k < pop.size(); ++k) {
    if (initial[k].size() != b.dims())
      throw DomainError("optimizer: initial member has wrong dimension");
    pop[k] = b.clip(initial[k]);
  }
  return pop;
}

std::size_t argmin(const std::vector<double> &v) {
  return static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
}

} // namespace

OptimResult ga_minimize(const Objective &objective, const Bounds &bounds, const GaParams &params,
                        const std::vector<VectorXd> &initial) {
  check_bounds(bounds);
  if (params.population < 1)
    throw DomainError("ga_minimize: population must be >= 1");
  const int N = params.population;
  const Index d = bounds.dims();
  const VectorXd width = bounds.hi - bounds.lo;
  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> any(0, N - 1);

  std::vector<VectorXd> pop = starting_population(bounds, N, rng, initial);
  std::vector<double> fit(pop.size());
  parallel_for(pop.size(), [&](std::size_t k) { fit[k] = safe_eval(objective, pop[k]); });

  auto tournament = [&]() {
    std::size_t best = static_cast<std::size_t>(any(rng));
    for (int t = 1; t < 3; ++t) {
      const auto c = static_cast<std::size_t>(any(rng));
      if (fit[c] < fit[best] || (fit[c] == fit[best] && c < best))
        best = c;
    }
    return best;
  };

  OptimResult res;
  const int rest = N - 1;
  const int n_cross = static_cast<int>(std::lround(params.crossover_fraction * rest));
  const int n_mut = static_cast<int>(std::lround(params.mutation_fraction * rest));
  for (int it = 0; it < params.max_iters; ++it) {
    const std::size_t elite = argmin(fit);
    std::vector<VectorXd> next(pop.size());
    std::vector<double> next_fit(pop.size(), 0.0);
    std::vector<bool> dirty(pop.size(), false);
    next[0] = pop[elite];
    next_fit[0] = fit[elite];

    int slot = 1;
    while (slot < N && slot - 1 < n_cross) {
      const VectorXd &p1 = pop[tournament()];
      const VectorXd &p2 = pop[tournament()];
      const VectorXd gamma = VectorXd::NullaryExpr(d, [&] {
        return -params.blend_alpha + (1.0 + 2.0 * params.blend_alpha) * unit(rng);
      });
      const VectorXd one = VectorXd::Ones(d);
      next[static_cast<std::size_t>(slot)] =
          bounds.clip(gamma.cwiseProduct(p1) + (one - gamma).cwiseProduct(p2));
      dirty[static_cast<std::size_t>(slot)] = true;
      ++slot;
      if (slot < N && slot - 1 < n_cross) {
        next[static_cast<std::size_t>(slot)] =
            bounds.clip(gamma.cwiseProduct(p2) + (one - gamma).cwiseProduct(p1));
        dirty[static_cast<std::size_t>(slot)] = true;
        ++slot;
      }
    }
    for (; slot < N; ++slot) {
      const std::size_t pick = tournament();
      next[static_cast<std::size_t>(slot)] = pop[pick];
      next_fit[static_cast<std::size_t>(slot)] = fit[pick];
    }

    if (rest > 0 && n_mut > 0) {
      std::vector<int> slots(static_cast<std::size_t>(rest));
      std::iota(slots.begin(), slots.end(), 1);
      for (int k = 0; k < std::min(n_mut, rest); ++k) {
        std::uniform_int_distribution<int> pick(k, rest - 1);
        std::swap(slots[static_cast<std::size_t>(k)], slots[static_cast<std::size_t>(pick(rng))]);
        const auto s = static_cast<std::size_t>(slots[static_cast<std::size_t>(k)]);
        VectorXd &x = next[s];
        for (Index g = 0; g < d; ++g)
          if (unit(rng) < params.mutation_rate)
            x[g] += params.mutation_scale * width[g] * gauss(rng);
        x = bounds.clip(x);
        dirty[s] = true;
      }
    }

    parallel_for(next.size(), [&](std::size_t k) {
      if (dirty[k])
        next_fit[k] = safe_eval(objective, next[k]);
    });
    pop = std::move(next);
    fit = std::move(next_fit);
    res.history.push_back(fit[argmin(fit)]);
  }
  const std::size_t best = argmin(fit);
  res.best = pop[best];
  res.best_value = fit[best];
  return res;
}

OptimResult pso_minimize(const Objective &objective, const Bounds &bounds,
                         const PsoParams &params, const std::vector<VectorXd> &initial,
                         const std::vector<VectorXd> &initial_velocity) {
  check_bounds(bounds);
  if (params.population < 1)
    throw DomainError("pso_minimize: population must be >= 1");
  const Index d = bounds.dims();
  const VectorXd vmax = params.velocity_clamp * (bounds.hi - bounds.lo);
  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<VectorXd> x = starting_population(bounds, params.population, rng, initial);
  std::vector<VectorXd> v(x.size(), VectorXd::Zero(d));
  for (std::size_t k = 0; k < initial_velocity.size() && k < v.size(); ++k)
    v[k] = initial_velocity[k].cwiseMax(-vmax).cwiseMin(vmax);
  std::vector<double> fit(x.size());
  parallel_for(x.size(), [&](std::size_t k) { fit[k] = safe_eval(objective, x[k]); });
  std::vector<VectorXd> pbest = x;
  std::vector<double> pbest_val = fit;
  std::size_t g = argmin(pbest_val);
  VectorXd gbest = pbest[g];
  double gbest_val = pbest_val[g];

  OptimResult res;
  for (int it = 0; it < params.max_iters; ++it) {
    for (std::size_t k = 0; k < x.size(); ++k) {
      const VectorXd r1 = VectorXd::NullaryExpr(d, [&] { return unit(rng); });
      const VectorXd r2 = VectorXd::NullaryExpr(d, [&] { return unit(rng); });
      v[k] = params.inertia * v[k] +
             params.personal * r1.cwiseProduct(pbest[k] - x[k]) +
             params.global * r2.cwiseProduct(gbest - x[k]);
      v[k] = v[k].cwiseMax(-vmax).cwiseMin(vmax);
      const VectorXd moved = x[k] + v[k];
      x[k] = bounds.clip(moved);
      for (Index j = 0; j < d; ++j)
        if (x[k][j] != moved[j])
          v[k][j] = 0.0;
    }
    parallel_for(x.size(), [&](std::size_t k) { fit[k] = safe_eval(objective, x[k]); });
    for (std::size_t k = 0; k < x.size(); ++k) {
      if (fit[k] < pbest_val[k]) {
        pbest[k] = x[k];
        pbest_val[k] = fit[k];
      }
    }
    g = argmin(pbest_val);
    if (pbest_val[g] < gbest_val) {
      gbest = pbest[g];
      gbest_val = pbest_val[g];
    }
    res.history.push_back(gbest_val);
  }
  res.best = gbest;
  res.best_value = gbest_val;
  return res;
}

void write_history_csv(std::ostream &out, const std::vector<double> &history) {
  out << "iter,best_value\n";
  for (std::size_t k = 0; k < history.size(); ++k)
    out << (k + 1) << ',' << text::format_double(history[k]) << '\n';
}

} // namespace drawres
