#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "drawres/pipeline.hpp"
#include "drawres/ranks.hpp"
#include "drawres/selection.hpp"
#include "drawres/synth.hpp"

using namespace drawres;

namespace {

VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(Index(v.size()));
  Index k = 0;
  for (double x : v)
    out[k++] = x;
  return out;
}

// y = x1^2 with x2 pure noise; both inputs uniform on [-1, 1]
void square_problem(std::uint64_t seed, Index rows, MatrixXd &X, VectorXd &y, double noise) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::normal_distribution<double> g(0.0, noise > 0 ? noise : 1.0);
  X.resize(rows, 2);
  y.resize(rows);
  for (Index r = 0; r < rows; ++r) {
    X(r, 0) = u(rng);
    X(r, 1) = u(rng);
    y[r] = X(r, 0) * X(r, 0) + (noise > 0 ? g(rng) : 0.0);
  }
}

FeatureScores scores_for(int n) {
  FeatureScores s;
  s.spearman_abs.resize(n);
  s.rf_importance.resize(n);
  std::mt19937_64 rng{static_cast<std::uint64_t>(n)};
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < n; ++k) {
    s.names.push_back("X" + std::to_string(100 + k));
    s.spearman_abs[k] = u(rng);
    s.rf_importance[k] = u(rng);
  }
  s.rf_importance /= s.rf_importance.sum();
  return s;
}

} // namespace

TEST_CASE("average ranks") {
  CHECK(average_ranks(vec({10, 20, 30})) == vec({1, 2, 3}));
  CHECK(average_ranks(vec({5, 5, 7})) == vec({1.5, 1.5, 3}));
  CHECK(average_ranks(vec({2, 2, 2, 2})) == vec({2.5, 2.5, 2.5, 2.5}));
  CHECK_THROWS_AS(average_ranks(VectorXd()), DomainError);
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> d(0, 20);
  for (int rep = 0; rep < 20; ++rep) {
    VectorXd v(137);
    for (Index k = 0; k < v.size(); ++k)
      v[k] = d(rng);
    const VectorXd r = average_ranks(v);
    CHECK(r.sum() == doctest::Approx(137.0 * 138.0 / 2.0).epsilon(1e-12));
    CHECK(r.minCoeff() >= 1.0);
    CHECK(r.maxCoeff() <= 137.0);
  }
}

TEST_CASE("spearman rho") {
  CHECK(spearman_rho(vec({1, 2, 3}), vec({10, 20, 30})) == doctest::Approx(1.0));
  CHECK(spearman_rho(vec({1, 2, 3, 4}), vec({4, 3, 2, 1})) == doctest::Approx(-1.0));
  CHECK(spearman_rho(vec({1, 2, 3}), vec({3, 1, 2})) == doctest::Approx(-0.5));
  CHECK_THROWS_AS(spearman_rho(vec({1, 1, 1}), vec({1, 2, 3})), DomainError);
  CHECK_THROWS_AS(spearman_rho(vec({1}), vec({1})), DomainError);

  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  VectorXd x(200), y(200);
  for (Index k = 0; k < 200; ++k) {
    x[k] = g(rng);
    y[k] = 0.5 * x[k] + g(rng);
  }
  const double rho = spearman_rho(x, y);
  CHECK(spearman_rho(y, x) == doctest::Approx(rho).epsilon(1e-14));
  const VectorXd ex = x.array().exp(), cube = y.array().cube();
  CHECK(spearman_rho(ex, y) == doctest::Approx(rho).epsilon(1e-12));
  CHECK(spearman_rho(x, cube) == doctest::Approx(rho).epsilon(1e-12));
  CHECK(spearman_rho(ex, cube) == doctest::Approx(rho).epsilon(1e-12));
}

TEST_CASE("random forest basics") {
  MatrixXd X;
  VectorXd y;
  square_problem(1, 300, X, y, 0.05);

  SUBCASE("constant target gives a degenerate forest") {
    const VectorXd c = VectorXd::Constant(300, 4.25);
    const Forest f = fit_random_forest(X, c, {20, 5, 0, 3});
    CHECK(f.degenerate);
    CHECK((f.predict(X).array() == 4.25).all());
    CHECK(rf_importances(f).isZero());
  }
  SUBCASE("same seed gives the same forest") {
    const Forest a = fit_random_forest(X, y, {20, 5, 0, 11});
    const Forest b = fit_random_forest(X, y, {20, 5, 0, 11});
    CHECK(a.predict(X) == b.predict(X));
    CHECK(rf_importances(a) == rf_importances(b));
    const Forest c = fit_random_forest(X, y, {20, 5, 0, 12});
    CHECK_FALSE(a.predict(X) == c.predict(X));
  }
  SUBCASE("importances are normalized and leaves respect min_leaf") {
    const Forest f = fit_random_forest(X, y, {20, 5, 0, 2});
    CHECK(rf_importances(f).sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((rf_importances(f).array() >= 0).all());
    // a leaf value is the mean of at least min_leaf bootstrap targets, so no
    // tree grows more than n / min_leaf leaves
    for (const auto &t : f.trees) {
      const auto leaves = std::count_if(t.nodes.begin(), t.nodes.end(),
                                        [](const TreeNode &n) { return n.feature < 0; });
      CHECK(leaves <= 300 / 5);
    }
  }
  SUBCASE("training MSE does not exceed the mean predictor") {
    const Forest f = fit_random_forest(X, y, {20, 5, 0, 6});
    const double mse = (f.predict(X) - y).squaredNorm() / 300.0;
    const double base = (y.array() - y.mean()).square().mean();
    CHECK(mse <= base);
  }
  SUBCASE("input validation") {
    CHECK_THROWS_AS(fit_random_forest(X.topRows(1), y.head(1)), DomainError);
    CHECK_THROWS_AS(fit_random_forest(X, y.head(10)), DomainError);
  }
}

TEST_CASE("forest learns a square over seeds") {
  int good_r = 0, good_importance = 0;
  double r_sum = 0.0;
  for (int s = 1; s <= 20; ++s) {
    MatrixXd X, Xt;
    VectorXd y, yt;
    square_problem(std::uint64_t(s), 400, X, y, 0.05);
    square_problem(std::uint64_t(1000 + s), 200, Xt, yt, 0.05);
    const Forest f = fit_random_forest(X, y, {20, 5, 0, std::uint64_t(s)});
    const double r = pearson_r(f.predict(Xt), yt);
    r_sum += r;
    good_r += r > 0.8 ? 1 : 0;

    MatrixXd Xe;
    VectorXd ye;
    square_problem(std::uint64_t(500 + s), 400, Xe, ye, 0.0);
    const VectorXd imp = rf_importances(fit_random_forest(Xe, ye, {20, 5, 0, std::uint64_t(s)}));
    good_importance += imp[0] > imp[1] ? 1 : 0;
  }
  CHECK(r_sum / 20.0 > 0.8);
  CHECK(good_r >= 19);
  CHECK(good_importance >= 19);
}

TEST_CASE("two-stage selection counts") {
  SUBCASE("82 indicators") {
    const FeatureSelection s = select(scores_for(82));
    CHECK(s.direct.size() == 25);
    CHECK(s.potential.size() == 14);
    for (const auto &p : s.potential)
      CHECK(std::find(s.direct.begin(), s.direct.end(), p) == s.direct.end());
  }
  SUBCASE("10 indicators") { CHECK(select(scores_for(10), 0.30).direct.size() == 3); }
  SUBCASE("no indicators") {
    const FeatureSelection s = select(FeatureScores{});
    CHECK(s.direct.empty());
    CHECK(s.potential.empty());
  }
  SUBCASE("direct takes the highest |rho|, potential the highest importance of the rest") {
    FeatureScores s;
    s.names = {"A", "B", "C", "D", "E"};
    s.spearman_abs = vec({0.1, 0.9, 0.5, 0.2, 0.3});
    s.rf_importance = vec({0.5, 0.3, 0.05, 0.1, 0.05});
    const FeatureSelection sel = select(s, 0.4, 0.5);
    CHECK(sel.direct == std::vector<std::string>{"B", "C"});
    CHECK(sel.potential == std::vector<std::string>{"A", "D"});
  }
  SUBCASE("ties break by indicator id") {
    FeatureScores s;
    s.names = {"C", "A", "B"};
    s.spearman_abs = vec({0.5, 0.5, 0.5});
    s.rf_importance = vec({0.2, 0.4, 0.4});
    const FeatureSelection sel = select(s, 0.3, 0.5);
    CHECK(sel.direct == std::vector<std::string>{"A"});
    CHECK(sel.potential == std::vector<std::string>{"B"});
  }
  SUBCASE("raising f_lin never drops a direct indicator") {
    const FeatureScores s = scores_for(82);
    std::vector<std::string> prev;
    for (double f = 0.05; f <= 1.0; f += 0.05) {
      auto cur = select(s, f).direct;
      std::sort(cur.begin(), cur.end());
      CHECK(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
      prev = cur;
    }
  }
}

TEST_CASE("score CSV round trip") {
  const FeatureScores s = scores_for(12);
  const FeatureSelection sel = select(s);
  std::stringstream io;
  write_scores_csv(io, s, sel);
  FeatureScores s2;
  FeatureSelection sel2;
  read_scores_csv(io, s2, sel2);
  CHECK(s2.names == s.names);
  CHECK(s2.spearman_abs == s.spearman_abs);
  CHECK(s2.rf_importance == s.rf_importance);
  CHECK(sel2.direct == sel.direct);
  CHECK(sel2.potential == sel.potential);
}

TEST_CASE("selection recovers planted indicators on synthetic lines") {
  PlantedDesign design;
  design.n_direct = 5;
  design.n_square = 2;
  design.n_threshold = 1;
  design.n_product = 0;
  double recovered = 0.0, planted = 0.0;
  for (int s = 1; s <= 20; ++s) {
    SynthConfig c = default_synth_config(std::uint64_t(200 + s), design);
    c.periods_per_shift = 20;
    c.points_per_period = 50;
    c.reject_cluster = {10.0, 1.16, 20};
    const SynthOutput out = generate(c);
    const IngestResult data = ingest(parse_change_log(out.records));
    const auto names = candidate_features(data.frame);
    const SampleSet all = shift_samples(data, names, kTargetId);
    ForestParams fp;
    fp.seed = std::uint64_t(s);
    const FeatureSelection sel = select(score_features(all.X, all.y, names, fp));
    for (const auto &d : out.truth.direct)
      recovered += std::count(sel.direct.begin(), sel.direct.end(), d);
    for (const auto &p : out.truth.potential)
      recovered += std::count(sel.potential.begin(), sel.potential.end(), p);
    planted += double(out.truth.direct.size() + out.truth.potential.size());
  }
  CHECK(recovered / planted >= 0.8);
}
