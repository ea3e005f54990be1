#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "drawres/sampling.hpp"

using namespace drawres;

namespace {

// composite Simpson rule over the standard normal density
double normal_mass(double n) {
  const int steps = 20000;
  const double h = 2.0 * n / steps;
  auto pdf = [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); };
  double s = pdf(-n) + pdf(n);
  for (int k = 1; k < steps; ++k)
    s += (k % 2 ? 4.0 : 2.0) * pdf(-n + k * h);
  return s * h / 3.0;
}

std::vector<bool> mask_with(const std::vector<int> &period_counts, int per_period) {
  std::vector<bool> mask;
  for (int c : period_counts)
    for (int k = 0; k < per_period; ++k)
      mask.push_back(k < c);
  return mask;
}

} // namespace

TEST_CASE("period histogram") {
  SUBCASE("no rejects") {
    const auto d = period_histogram(std::vector<bool>(1000, false), 100, 43200);
    CHECK(d.m1 == 0);
    for (double c : d.counts)
      CHECK(c == 0);
    CHECK_THROWS_WITH_AS(fit_normal(d), "insufficient rejects to fit", DomainError);
  }
  SUBCASE("cluster at period 50") {
    std::vector<int> counts(100, 0);
    counts[48] = 3;
    counts[49] = 9;
    counts[50] = 4;
    const auto d = period_histogram(mask_with(counts, 10), 100, 43200);
    CHECK(d.m1 == 16);
    const auto top = std::max_element(d.counts.begin(), d.counts.end()) - d.counts.begin();
    CHECK(top + 1 == 50);
  }
  SUBCASE("explicit period ids") {
    const std::vector<bool> mask = {true, false, true, true};
    const std::vector<int> ids = {2, 0, 2, 3};
    const auto d = period_histogram(mask, ids, 3, 10);
    CHECK(d.counts == std::vector<double>{0, 2, 1});
    const std::vector<int> bad = {4, 0, 2, 3};
    CHECK_THROWS_AS(period_histogram(mask, bad, 3, 10), DomainError);
  }
  CHECK_THROWS_AS(period_histogram(std::vector<bool>(10), 0, 1.0), DomainError);
}

TEST_CASE("normal fit") {
  SUBCASE("symmetric counts") {
    std::vector<int> counts(100, 0);
    counts[47] = 2;
    counts[48] = 5;
    counts[49] = 8;
    counts[50] = 5;
    counts[51] = 2;
    const auto d = fit_normal(period_histogram(mask_with(counts, 10), 100, 43200));
    CHECK(d.mu == doctest::Approx(50.0));
  }
  SUBCASE("one period hits the floor") {
    std::vector<int> counts(100, 0);
    counts[20] = 7;
    const auto d = fit_normal(period_histogram(mask_with(counts, 10), 100, 43200));
    CHECK(d.mu == doctest::Approx(21.0));
    CHECK(d.sigma == 0.5);
  }
  SUBCASE("discretized normal samples") {
    for (auto [mu, m1, rel] : {std::tuple{30.0, 1055, 0.15 / 1.16}, std::tuple{50.0, 500, 0.15}}) {
      for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> g(mu, 1.16);
        SubstandardDistribution d;
        d.j1 = 100;
        d.y_s = 43200;
        d.counts.assign(100, 0.0);
        for (int k = 0; k < m1; ++k) {
          const int id = int(std::lround(g(rng)));
          d.counts[std::size_t(id - 1)] += 1.0;
          d.m1 += 1.0;
        }
        const auto f = fit_normal(d);
        CHECK(std::abs(f.mu - mu) <= 0.2);
        CHECK(std::abs(f.sigma - 1.16) <= rel * 1.16);
      }
    }
  }
}

TEST_CASE("coverage") {
  CHECK(std::abs(coverage(1.0) - 0.6827) <= 1e-3);
  CHECK(std::abs(coverage(2.576) - 0.990) <= 1e-3);
  CHECK(std::abs(coverage(2.576) - normal_mass(2.576)) <= 1e-6);
  double prev = 0.0;
  for (double n = 0.1; n <= 6.0; n += 0.1) {
    CHECK(coverage(n) > prev);
    prev = coverage(n);
  }
  CHECK(coverage(6.0) >= 1.0 - 1e-8);
  CHECK_THROWS_AS(coverage(0.0), DomainError);
}

TEST_CASE("sampling probabilities") {
  CHECK(p_sampled_exact(100.0, 10.0, 0.0) == 0.0);
  CHECK(p_sampled_exact(10.0, 2.0, 1.0) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(p_sampled_exact(10.0, 9.5, 1.0) == 1.0);
  CHECK(p_sampled_exact(10.0, 5.0, 6.0) == 1.0);
  CHECK_THROWS_AS(p_sampled_exact(10.0, 11.0, 1.0), DomainError);
  const double exact = p_sampled_exact(4320000.0, 200.0, 1055.0);
  CHECK(std::abs(exact - 0.0477) <= 0.0005);

  CHECK(p_sampled_approx(100.0, 10.0, 0.0) == 0.0);
  CHECK(p_sampled_approx(10.0, 2.0, 1.0) == doctest::Approx(0.19).epsilon(1e-12));
  const double approx = p_sampled_approx(4320000.0, 200.0, 1055.0);
  CHECK(std::abs(approx - 0.0477) <= 0.0005);
  CHECK(std::abs(exact - approx) < 1e-4);

  SUBCASE("monotone in m and Z") {
    double prev = 0.0;
    for (double m = 0; m <= 200; m += 5) {
      const double p = p_sampled_exact(5000.0, 40.0, m);
      CHECK(p >= prev);
      prev = p;
    }
    prev = 0.0;
    for (double z = 0; z <= 400; z += 10) {
      const double p = p_sampled_exact(5000.0, z, 30.0);
      CHECK(p >= prev);
      prev = p;
    }
  }
  SUBCASE("approximation gap bound") {
    for (double Y : {1e4, 1e5, 1e6, 4.32e6})
      for (double Z : {10.0, 50.0, 200.0, 1000.0})
        for (double m : {1.0, 10.0, 100.0, 1000.0}) {
          const double gap = std::abs(p_sampled_exact(Y, Z, m) - p_sampled_approx(Y, Z, m));
          CHECK(gap < (Z * m * m + Z * Z * m) / (Y * Y));
        }
  }
}

TEST_CASE("random and targeted plans") {
  CHECK(std::abs(p_old(100, 43200, 1055, 200) - 0.047) <= 0.001);
  CHECK(std::abs(p_old(100, 43200, 1055, 200) - p_sampled_exact(4320000.0, 200.0, 1055.0)) < 1e-4);
  CHECK(p_old(100, 43200, 0, 200) == 0.0);

  const TargetedPlan worked = p_new(1.16, 2.576, 43200, 1055, 200, CoverageMode::PaperExample);
  CHECK(worked.j2 == 6);
  CHECK(worked.m2 == 1055.0);
  CHECK(std::abs(worked.p - 0.558) <= 0.001);
  const TargetedPlan eq = p_new(1.16, 2.576, 43200, 1055, 200, CoverageMode::Eq19);
  CHECK(eq.j2 == 6);
  CHECK(eq.m2 == doctest::Approx(coverage(2.576) * 1055.0));
  CHECK(std::abs(eq.p - 0.554) <= 0.001);
  CHECK(p_new(1.16, 2.576, 43200, 0, 200, CoverageMode::Eq19).p == 0.0);
  CHECK(p_new(0.05, 1.0, 10, 30, 5, CoverageMode::PaperExample).p == 1.0);
  CHECK(p_new(0.05, 1.0, 10, 30, 5, CoverageMode::PaperExample).j2 == 1);
  CHECK_THROWS_AS(p_new(0.0, 2.576, 43200, 1055, 200, CoverageMode::Eq19), DomainError);

  SamplingPlanConfig plan;
  const SamplingReport r = make_report(plan, 1055, 50, 1.16);
  CHECK(std::abs(r.delta_p - 0.511) <= 0.002);
  CHECK(r.delta_p == r.p_new - r.p_old);
  CHECK(r.Z2 == r.Z1);
  CHECK(r.j2 < plan.j1);
  CHECK(make_report(plan, 0, 50, 1.16).delta_p == 0.0);

  std::ostringstream text;
  write_report_text(text, r);
  for (const char *needle : {"P_old = 0.047", "P_new = 0.557", "j2 = 6", "paper-example", "(47.01, 52.99)"})
    CHECK(text.str().find(needle) != std::string::npos);
  std::ostringstream csv;
  write_report_csv(csv, {r});
  CHECK(csv.str().rfind("label,Y1,Z1,m1,n,mu,sigma,j2,Y2,Z2,m2,P_old,P_new,delta_P,mode\n", 0) == 0);

  SUBCASE("targeting helps when it concentrates the rejects") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> sig(0.3, 5.0), en(0.5, 3.5), ys(100, 50000), mm(1, 2000),
        zz(1, 500);
    std::uniform_int_distribution<int> jj(5, 200);
    int checked = 0;
    for (int k = 0; k < 2000; ++k) {
      SamplingPlanConfig p;
      p.j1 = jj(rng);
      p.y_s = ys(rng);
      p.Z = zz(rng);
      p.n = en(rng);
      p.mode = k % 2 ? CoverageMode::Eq19 : CoverageMode::PaperExample;
      const double m1 = std::min(mm(rng), p.j1 * p.y_s);
      const SamplingReport q = make_report(p, m1, 10, sig(rng));
      if (q.j2 < p.j1 && q.m2 / q.Y2 > m1 / q.Y1) {
        ++checked;
        CHECK(q.delta_p > 0.0);
      }
    }
    CHECK(checked > 100);
  }
}

TEST_CASE("Monte Carlo agrees with the exact formula") {
  CHECK(monte_carlo_p(100, 10, 0, 1000, 1).estimate == 0.0);
  const MonteCarloEstimate small = monte_carlo_p(10, 2, 1, 1000000, 2);
  CHECK(std::abs(small.estimate - 0.2) <= 3.0 * small.standard_error);
  const MonteCarloEstimate worked = monte_carlo_p(4320000, 200, 1055, 100000, 3);
  CHECK(std::abs(worked.estimate - p_sampled_exact(4320000.0, 200.0, 1055.0)) <=
        3.0 * worked.standard_error);
  const MonteCarloEstimate again = monte_carlo_p(4320000, 200, 1055, 100000, 3);
  CHECK(again.estimate == worked.estimate);
  CHECK_THROWS_AS(monte_carlo_p(10, 2, 1, 0, 1), DomainError);
}
