#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "drawres/anfis.hpp"
#include "drawres/anfis_tuning.hpp"
#include "drawres/optimizers.hpp"

using namespace drawres;

namespace {

double sphere(const VectorXd &v) { return v.squaredNorm(); }

double rastrigin(const VectorXd &v) {
  double s = 10.0 * double(v.size());
  for (Index i = 0; i < v.size(); ++i)
    s += v[i] * v[i] - 10.0 * std::cos(2.0 * std::numbers::pi * v[i]);
  return s;
}

bool monotone(const std::vector<double> &h) {
  for (std::size_t k = 1; k < h.size(); ++k)
    if (h[k] > h[k - 1])
      return false;
  return true;
}

MatrixXd sample_inputs(std::uint64_t seed, Index rows, Index cols) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  MatrixXd X(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r)
      X(r, c) = g(rng);
  return X;
}

FuzzyRuleBase two_rule_fis() {
  FuzzyRuleBase f = FuzzyRuleBase::zeros(2, 2);
  f.a << 0.8, 1.1, 1.3, 0.9;
  f.b << 1.0, 1.2, 0.9, 1.0;
  f.c << -0.5, 0.2, 0.7, -0.1;
  f.coef << 1.5, -0.3, 0.2, 2.0;
  f.bias << 0.4, -1.0;
  return f;
}

double rmse(const FuzzyRuleBase &f, const MatrixXd &X, const VectorXd &y) {
  return std::sqrt(anfis_mse(f, X, y));
}

} // namespace

TEST_CASE("parameter vector layout") {
  const MatrixXd X = sample_inputs(1, 50, 2);
  const ColumnStats stats = ColumnStats::of(X);
  const FuzzyRuleBase f = two_rule_fis();
  const ParamVector p = flatten(f, stats);
  CHECK(p.values.size() == 18);
  CHECK(p.premise_size() == 12);
  CHECK(p.bounds.dims() == 18);

  bool clipped = true;
  const FuzzyRuleBase back = unflatten(p, &clipped);
  CHECK_FALSE(clipped);
  CHECK(back.a == f.a);
  CHECK(back.b == f.b);
  CHECK(back.c == f.c);
  CHECK(back.coef == f.coef);
  CHECK(back.bias == f.bias);

  // bounds follow the column statistics
  CHECK(p.bounds.lo[0] == 1e-6);
  CHECK(p.bounds.hi[0] == doctest::Approx(10.0 * stats.sd[0]));
  CHECK(p.bounds.lo[1] == 0.5);
  CHECK(p.bounds.hi[1] == 5.0);
  CHECK(p.bounds.lo[2] == doctest::Approx(stats.min[0] - stats.sd[0]));
  CHECK(p.bounds.hi[2] == doctest::Approx(stats.max[0] + stats.sd[0]));
  CHECK(p.bounds.hi[17] == 1e6);
  CHECK(p.describe(2) == "rule 0 input 0 c");
  CHECK(p.describe(17) == "rule 1 bias");

  ParamVector out = p;
  out.values[1] = 50.0;
  out.values[17] = -3e6;
  const FuzzyRuleBase c = unflatten(out, &clipped);
  CHECK(clipped);
  CHECK(c.b(0, 0) == 5.0);
  CHECK(c.bias[1] == -1e6);

  ParamVector wrong = p;
  wrong.values.conservativeResize(17);
  CHECK_THROWS_AS(unflatten(wrong), DomainError);
}

TEST_CASE("GA and PSO on the sphere") {
  const Bounds box = Bounds::uniform(5, -5.0, 5.0);
  GaParams ga;
  ga.seed = 4;
  const OptimResult g = ga_minimize(sphere, box, ga);
  CHECK(g.best_value < 1e-3);
  CHECK(g.history.size() <= 2000);
  CHECK(monotone(g.history));
  CHECK(g.best_value == sphere(g.best));
  CHECK(g.history.back() == g.best_value);

  PsoParams pso;
  pso.seed = 4;
  const OptimResult p = pso_minimize(sphere, box, pso);
  CHECK(p.best_value < 1e-3);
  CHECK(p.history.size() <= 2000);
  CHECK(monotone(p.history));
  CHECK(p.best_value == sphere(p.best));
  CHECK(((p.best.array() >= -5.0) && (p.best.array() <= 5.0)).all());
}

TEST_CASE("seeded runs repeat exactly") {
  const Bounds box = Bounds::uniform(3, -2.0, 2.0);
  GaParams ga;
  ga.population = 10;
  ga.max_iters = 100;
  ga.seed = 77;
  const OptimResult a = ga_minimize(rastrigin, box, ga), b = ga_minimize(rastrigin, box, ga);
  CHECK(a.history == b.history);
  CHECK(a.best == b.best);
  std::ostringstream ha, hb;
  write_history_csv(ha, a.history);
  write_history_csv(hb, b.history);
  CHECK(ha.str() == hb.str());
  CHECK(ha.str().rfind("iter,best_value\n1,", 0) == 0);

  PsoParams pso;
  pso.population = 10;
  pso.max_iters = 100;
  pso.seed = 77;
  const OptimResult c = pso_minimize(rastrigin, box, pso), d = pso_minimize(rastrigin, box, pso);
  CHECK(c.history == d.history);
  CHECK(c.best == d.best);
  pso.seed = 78;
  CHECK_FALSE(pso_minimize(rastrigin, box, pso).history == c.history);
}

TEST_CASE("degenerate objectives") {
  const Bounds box = Bounds::uniform(4, -1.0, 1.0);
  const Objective flat = [](const VectorXd &) { return 2.5; };
  GaParams ga;
  ga.max_iters = 50;
  CHECK(ga_minimize(flat, box, ga).best_value == 2.5);
  PsoParams pso;
  pso.max_iters = 50;
  CHECK(pso_minimize(flat, box, pso).best_value == 2.5);

  // non-finite values never win
  const Objective holes = [](const VectorXd &v) {
    return v[0] > 0.0 ? std::numeric_limits<double>::quiet_NaN() : v.squaredNorm();
  };
  const OptimResult g = ga_minimize(holes, box, ga);
  CHECK(std::isfinite(g.best_value));
  CHECK(g.best[0] <= 0.0);
  const OptimResult p = pso_minimize(holes, box, pso);
  CHECK(std::isfinite(p.best_value));
}

TEST_CASE("a lone particle at the optimum stays there") {
  const Bounds box = Bounds::uniform(5, -5.0, 5.0);
  PsoParams pso;
  pso.population = 1;
  pso.max_iters = 100;
  const OptimResult r =
      pso_minimize(sphere, box, pso, {VectorXd::Zero(5)}, {VectorXd::Zero(5)});
  CHECK(r.best_value == 0.0);
  CHECK(r.best.isZero(0.0));
}

TEST_CASE("PSO on Rastrigin against a grid search") {
  const int cells = 1024;
  double grid_best = std::numeric_limits<double>::infinity();
  VectorXd v(2);
  for (int i = 0; i < cells; ++i)
    for (int j = 0; j < cells; ++j) {
      v << -5.12 + 10.24 * i / (cells - 1), -5.12 + 10.24 * j / (cells - 1);
      grid_best = std::min(grid_best, rastrigin(v));
    }
  PsoParams pso;
  pso.seed = 5;
  const OptimResult r = pso_minimize(rastrigin, Bounds::uniform(2, -5.12, 5.12), pso);
  CHECK(r.best_value <= grid_best + 0.1);
}

TEST_CASE("GA keeps its elite") {
  const Bounds box = Bounds::uniform(3, -5.0, 5.0);
  GaParams ga;
  ga.population = 10;
  ga.max_iters = 30;
  ga.seed = 3;
  const VectorXd start = VectorXd::Constant(3, 0.01);
  const OptimResult r = ga_minimize(sphere, box, ga, {start});
  CHECK(r.best_value <= sphere(start));
  CHECK(r.history.front() <= sphere(start));
}

TEST_CASE("metaheuristic ANFIS tuning") {
  const MatrixXd X = sample_inputs(6, 120, 2);
  const VectorXd y = (X.col(0).array().square() + 0.5 * X.col(1).array()).matrix();
  const FuzzyRuleBase init = anfis_train_hybrid(two_rule_fis(), X, y, {10, 0.05});
  const double start = rmse(init, X, y);

  SUBCASE("zero budget returns the start") {
    GaParams ga;
    ga.max_iters = 0;
    const TuningResult r = anfis_metaheuristic_train(X, y, init, ga);
    CHECK(r.fis.a == init.a);
    CHECK(r.fis.c == init.c);
    CHECK(r.fis.coef == init.coef);
    CHECK(r.fis.bias == init.bias);
    PsoParams pso;
    pso.max_iters = 0;
    const TuningResult q = anfis_metaheuristic_train(X, y, init, pso);
    CHECK(q.fis.b == init.b);
    CHECK(q.fis.bias == init.bias);
  }
  SUBCASE("never worse than the start") {
    GaParams ga;
    ga.population = 10;
    ga.max_iters = 20;
    ga.seed = 1;
    const TuningResult g = anfis_metaheuristic_train(X, y, init, ga);
    CHECK(rmse(g.fis, X, y) <= start);
    CHECK(monotone(g.history));
    CHECK(g.history.back() == doctest::Approx(rmse(g.fis, X, y)).epsilon(1e-12));
    PsoParams pso;
    pso.population = 10;
    pso.max_iters = 20;
    pso.seed = 1;
    const TuningResult p = anfis_metaheuristic_train(X, y, init, pso);
    CHECK(rmse(p.fis, X, y) <= start);
    CHECK(monotone(p.history));
  }
  SUBCASE("premise-only search with least-squares consequents") {
    GaParams ga;
    ga.population = 8;
    ga.max_iters = 10;
    ga.seed = 2;
    TuningOptions opt;
    opt.refit_consequents = true;
    const TuningResult g = anfis_metaheuristic_train(X, y, init, ga, opt);
    CHECK(rmse(g.fis, X, y) <= start + 1e-12);
  }
}
