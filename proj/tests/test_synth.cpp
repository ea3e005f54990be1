#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "drawres/changelog.hpp"
#include "drawres/ranks.hpp"
#include "drawres/sampling.hpp"
#include "drawres/synth.hpp"

using namespace drawres;

namespace {

SynthConfig small_config(std::uint64_t seed) {
  SynthConfig c = default_synth_config(seed);
  c.periods_per_shift = 20;
  c.points_per_period = 20;
  c.tail_points = 30;
  c.reject_cluster = {10.0, 1.16, 20};
  return c;
}

} // namespace

TEST_CASE("default configuration shape") {
  const SynthConfig c = default_synth_config(3);
  CHECK(c.indicator_ids().size() == 82);
  CHECK(c.planted_direct.size() == 25);
  std::set<std::string> direct, potential;
  for (const auto &p : c.planted_direct)
    direct.insert(p.indicator);
  for (const auto &p : c.planted_potential)
    potential.insert(p.indicator);
  for (const auto &id : potential)
    CHECK(direct.count(id) == 0);
  CHECK_NOTHROW(c.validate());
  SynthConfig bad = c;
  bad.noise_sd = -1.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("noise-free single linear feature gives an affine target") {
  SynthConfig c = small_config(4);
  c.planted_direct = {{c.indicator_ids()[3], 2.0}};
  c.planted_potential.clear();
  c.noise_sd = 0.0;
  c.reject_cluster.m1 = 0;
  c.limits.sigma1 = 1e6;
  const SynthOutput out = generate(c);
  const VectorXd x = out.dense.column(c.indicator_ids()[3]);
  const VectorXd &y = out.truth.draw_resistance;
  MatrixXd A(x.size(), 2);
  A.col(0).setOnes();
  A.col(1) = x;
  const Eigen::Vector2d beta = A.colPivHouseholderQr().solve(y);
  const double worst = (A * beta - y).cwiseAbs().maxCoeff();
  CHECK(worst < 1e-9 * std::max(1.0, y.cwiseAbs().maxCoeff()));
  CHECK(beta[1] > 0.0);
  CHECK(x.maxCoeff() > x.minCoeff());
}

TEST_CASE("reject periods re-fit to the planted spread") {
  SynthConfig c = default_synth_config(8);
  c.shift_starts.resize(1);
  c.periods_per_shift = 100;
  c.points_per_period = 500;
  c.tail_points = 10;
  c.reject_cluster = {50.0, 1.16, 1055};
  const SynthOutput out = generate(c);
  const auto fit = fit_normal(period_histogram(out.truth.reject, out.truth.period_id, 100, 500));
  CHECK(fit.m1 == 1055);
  CHECK(std::abs(fit.sigma - 1.16) <= 0.15);
  CHECK(std::abs(fit.mu - 50.0) <= 0.5);
}

TEST_CASE("reject mask agrees with the limits") {
  const SynthConfig c = small_config(5);
  const SynthOutput out = generate(c);
  int count = 0;
  for (std::size_t k = 0; k < out.truth.reject.size(); ++k) {
    const double y = out.truth.draw_resistance[Index(k)];
    const bool outside = y < c.limits.lower() || y > c.limits.upper();
    if (out.truth.period_id[k] > 0)
      CHECK(out.truth.reject[k] == outside);
    else
      CHECK_FALSE(out.truth.reject[k]);
    count += out.truth.reject[k] ? 1 : 0;
  }
  CHECK(count == int(c.shift_starts.size()) * c.reject_cluster.m1);
}

TEST_CASE("same seed gives identical output") {
  const SynthConfig c = small_config(6);
  const SynthOutput a = generate(c), b = generate(c);
  CHECK(a.records == b.records);
  std::ostringstream ta, tb, pa, pb;
  write_truth_csv(ta, a.truth, a.dense);
  write_truth_csv(tb, b.truth, b.dense);
  write_planted_csv(pa, c);
  write_planted_csv(pb, c);
  CHECK(ta.str() == tb.str());
  CHECK(pa.str() == pb.str());
  const SynthOutput other = generate(small_config(7));
  CHECK_FALSE(other.records == a.records);
}

TEST_CASE("change-only records round trip through forward fill") {
  const SynthConfig c = small_config(9);
  const SynthOutput out = generate(c);
  const SeriesMap series = parse_change_log(out.records);
  CHECK(series.size() == out.dense.names.size());
  const Instant last = out.dense.time_at(out.dense.length() - 1);
  bool exact = true;
  for (std::size_t j = 0; j < out.dense.names.size(); ++j) {
    const VectorXd filled =
        forward_fill(series.at(out.dense.names[j]), out.dense.grid_start, last, c.step);
    exact = exact && filled == out.dense.values.col(Index(j));
  }
  CHECK(exact);
  // change-only: far fewer records than grid cells
  CHECK(out.records.size() < out.dense.values.size());
}

TEST_CASE("planted direct features outrank noise features by |rho|") {
  int wins = 0;
  const int seeds = 20;
  for (int s = 1; s <= seeds; ++s) {
    const SynthConfig c = small_config(std::uint64_t(100 + s));
    const SynthOutput out = generate(c);
    std::set<std::string> planted(out.truth.direct.begin(), out.truth.direct.end());
    planted.insert(out.truth.potential.begin(), out.truth.potential.end());
    std::vector<Index> rows;
    for (std::size_t k = 0; k < out.truth.period_id.size(); ++k)
      if (out.truth.period_id[k] > 0)
        rows.push_back(Index(k));
    VectorXd y(Index(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
      y[Index(r)] = out.truth.draw_resistance[rows[r]];
    double direct_sum = 0, noise_sum = 0;
    int direct_n = 0, noise_n = 0;
    for (const auto &id : c.indicator_ids()) {
      const VectorXd col = out.dense.column(id);
      VectorXd x(y.size());
      for (std::size_t r = 0; r < rows.size(); ++r)
        x[Index(r)] = col[rows[r]];
      if (x.maxCoeff() == x.minCoeff())
        continue;
      const double rho = std::abs(spearman_rho(x, y));
      if (std::find(out.truth.direct.begin(), out.truth.direct.end(), id) != out.truth.direct.end()) {
        direct_sum += rho;
        ++direct_n;
      } else if (!planted.count(id)) {
        noise_sum += rho;
        ++noise_n;
      }
    }
    if (direct_sum / direct_n > noise_sum / noise_n)
      ++wins;
  }
  // one-sided sign test at the 5% level needs 15 of 20
  CHECK(wins >= 15);
}

TEST_CASE("faults are injected and counted") {
  SynthConfig c = small_config(10);
  c.counter_fault_rate = 0.2;
  c.reset_fault_rate = 0.01;
  c.tail_points = 200;
  const SynthOutput out = generate(c);
  CHECK(out.truth.counter_faults > 0);
  CHECK(out.truth.reset_faults > 0);
  const VectorXd counter = out.dense.column(kCounterId);
  int spikes = 0;
  for (Index k = 0; k < counter.size(); ++k)
    spikes += counter[k] >= 20000.0 && (k == 0 || counter[k - 1] == 0.0) ? 1 : 0;
  CHECK(spikes == out.truth.counter_faults);
}
