#ifndef DRAWRES_SAMPLING_HPP
#define DRAWRES_SAMPLING_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "drawres/core.hpp"

namespace drawres {

/// Probability that a uniform sample of Z distinct items out of Y contains at
/// least one of m marked items: 1 - C(Y-m, Z) / C(Y, Z). The ratio is the product
/// of min(Z, m) factors (Y - max(Z, m) - k) / (Y - k), summed as log1p terms; past
/// 10^5 factors it switches to log-gamma. Returns exactly 1 when Z > Y - m.
template <typename Real>
Real p_sampled_exact(Real Y, Real Z, Real m) {
  if (!(m >= 0 && m <= Y && Z >= 0 && Z <= Y))
    throw DomainError("p_sampled_exact: need 0 <= m <= Y and 0 <= Z <= Y");
  if (m == 0 || Z == 0)
    return Real(0);
  if (Z > Y - m)
    return Real(1);
  const Real shorter = std::min(Z, m), longer = std::max(Z, m);
  Real log_ratio(0);
  if (shorter <= Real(100000) && shorter == std::floor(shorter)) {
    for (Real k(0); k < shorter; k += 1)
      log_ratio += std::log1p(-longer / (Y - k));
  } else {
    using std::lgamma;
    log_ratio = lgamma(Y - m + 1) - lgamma(Y - m - Z + 1) - lgamma(Y + 1) + lgamma(Y - Z + 1);
  }
  return -std::expm1(log_ratio);
}

/// Large-population form 1 - ((Y - m) / Y)^Z.
template <typename Real>
Real p_sampled_approx(Real Y, Real Z, Real m) {
  if (!(Y > 0))
    throw DomainError("p_sampled_approx: Y must be positive");
  if (m >= Y)
    return Real(1);
  return -std::expm1(Z * std::log1p(-m / Y));
}

/// Normal mass within n standard deviations of the mean.
template <typename Real>
Real coverage(Real n) {
  if (!(n > 0))
    throw DomainError("coverage: n must be positive");
  return std::erf(n / std::sqrt(Real(2)));
}

/// Uniform random sampling over a whole shift of j1 periods of y_s items each.
double p_old(double j1, double y_s, double m1, double Z1);

enum class CoverageMode {
  Eq19,         // m2 = coverage(n) * m1
  PaperExample, // m2 = m1
};

std::string to_string(CoverageMode mode);
CoverageMode coverage_mode_from_string(const std::string &text);

struct TargetedPlan {
  double p = 0.0;
  int j2 = 0;
  double m2 = 0.0;
};

/// Sampling restricted to j2 = max(1, round(2 n sigma)) periods around the mean.
/// Returns p = 1 exactly when m2 exceeds the targeted population.
TargetedPlan p_new(double sigma, double n, double y_s, double m1, double Z2, CoverageMode mode);

/// Reject counts per 1-based period id.
struct SubstandardDistribution {
  int j1 = 0;
  double y_s = 0.0;
  std::vector<double> counts; // counts[id - 1]
  double m1 = 0.0;
  double mu = 0.0;
  double sigma = 0.0;
};

/// Splits the mask into j1 equal consecutive periods (sample k belongs to period
/// floor(k * j1 / size) + 1) and counts true entries per period.
SubstandardDistribution period_histogram(const std::vector<bool> &mask, int j1, double y_s);

/// Same, with an explicit 1-based period id per sample.
SubstandardDistribution period_histogram(const std::vector<bool> &mask,
                                         const std::vector<int> &period_ids, int j1, double y_s);

/// Count-weighted mean and standard deviation of the period ids; sigma is
/// floored at 0.5. Throws DomainError("insufficient rejects to fit") when m1 < 2.
SubstandardDistribution fit_normal(SubstandardDistribution dist);

struct MonteCarloEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
};

/// Simulates `trials` draws of Z distinct items out of Y with m marked and reports
/// the fraction of draws holding at least one marked item.
MonteCarloEstimate monte_carlo_p(std::int64_t Y, std::int64_t Z, std::int64_t m,
                                 std::int64_t trials, std::uint64_t seed);

struct SamplingPlanConfig {
  int j1 = 100;
  double y_s = 43200.0;
  double Z = 200.0;
  double n = 2.576;
  CoverageMode mode = CoverageMode::PaperExample;
};

struct SamplingReport {
  double Y1 = 0.0, Z1 = 0.0, m1 = 0.0;
  double n = 0.0;
  int j2 = 0;
  double Y2 = 0.0, Z2 = 0.0, m2 = 0.0;
  double mu = 0.0, sigma = 0.0;
  double p_old = 0.0, p_new = 0.0, delta_p = 0.0;
  CoverageMode mode = CoverageMode::PaperExample;
  std::string label; // free-form identifier, e.g. the shift

  double interval_lo() const { return mu - n * sigma; }
  double interval_hi() const { return mu + n * sigma; }
};

/// Random and targeted plans for m1 rejects whose period ids follow N(mu, sigma^2).
SamplingReport make_report(const SamplingPlanConfig &plan, double m1, double mu, double sigma);

void write_report_csv(std::ostream &out, const std::vector<SamplingReport> &reports);
void write_report_text(std::ostream &out, const SamplingReport &report);

} // namespace drawres

#endif // DRAWRES_SAMPLING_HPP
