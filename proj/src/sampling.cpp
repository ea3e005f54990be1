#include "drawres/sampling.hpp"

#include <ostream>
#include <random>

#include "drawres/text.hpp"

namespace drawres {

double p_old(double j1, double y_s, double m1, double Z1) {
  if (!(j1 > 0 && y_s > 0 && Z1 >= 0 && m1 >= 0))
    throw DomainError("p_old: j1 and y_s must be positive");
  if (m1 > j1 * y_s)
    throw DomainError("p_old: more rejects than items");
  return p_sampled_approx(j1 * y_s, Z1, m1);
}

std::string to_string(CoverageMode mode) {
  return mode == CoverageMode::Eq19 ? "eq19" : "paper-example";
}

CoverageMode coverage_mode_from_string(const std::string &text) {
  if (text == "eq19")
    return CoverageMode::Eq19;
  if (text == "paper-example")
    return CoverageMode::PaperExample;
  throw DomainError("unknown coverage mode '" + text + "' (expected eq19 or paper-example)");
}

TargetedPlan p_new(double sigma, double n, double y_s, double m1, double Z2, CoverageMode mode) {
  if (!(sigma > 0.0) || !(n > 0.0))
    throw DomainError("p_new: sigma and n must be positive");
  if (!(y_s > 0.0) || m1 < 0.0)
    throw DomainError("p_new: y_s must be positive and m1 non-negative");
  TargetedPlan plan;
  plan.j2 = std::max(1, static_cast<int>(std::lround(2.0 * n * sigma)));
  plan.m2 = mode == CoverageMode::Eq19 ? coverage(n) * m1 : m1;
  const double Y2 = plan.j2 * y_s;
  plan.p = plan.m2 > Y2 ? 1.0 : p_sampled_approx(Y2, Z2, plan.m2);
  return plan;
}

SubstandardDistribution period_histogram(const std::vector<bool> &mask, int j1, double y_s) {
  if (j1 <= 0)
    throw DomainError("period_histogram: j1 must be positive");
  std::vector<int> ids(mask.size());
  const auto n = static_cast<long long>(mask.size());
  for (long long k = 0; k < n; ++k)
    ids[static_cast<std::size_t>(k)] = static_cast<int>(k * j1 / n) + 1;
  return period_histogram(mask, ids, j1, y_s);
}

SubstandardDistribution period_histogram(const std::vector<bool> &mask,
                                         const std::vector<int> &period_ids, int j1, double y_s) {
  if (j1 <= 0)
    throw DomainError("period_histogram: j1 must be positive");
  if (period_ids.size() != mask.size())
    throw DomainError("period_histogram: one period id per sample required");
  SubstandardDistribution d;
  d.j1 = j1;
  d.y_s = y_s;
  d.counts.assign(static_cast<std::size_t>(j1), 0.0);
  for (std::size_t k = 0; k < mask.size(); ++k) {
    if (!mask[k])
      continue;
    const int id = period_ids[k];
    if (id < 1 || id > j1)
      throw DomainError("period_histogram: period id " + std::to_string(id) + " out of range");
    d.counts[static_cast<std::size_t>(id - 1)] += 1.0;
    d.m1 += 1.0;
  }
  return d;
}

SubstandardDistribution fit_normal(SubstandardDistribution dist) {
  if (dist.m1 < 2.0)
    throw DomainError("insufficient rejects to fit");
  double mean = 0.0;
  for (std::size_t k = 0; k < dist.counts.size(); ++k)
    mean += static_cast<double>(k + 1) * dist.counts[k];
  mean /= dist.m1;
  double var = 0.0;
  for (std::size_t k = 0; k < dist.counts.size(); ++k) {
    const double dev = static_cast<double>(k + 1) - mean;
    var += dist.counts[k] * dev * dev;
  }
  var /= dist.m1;
  dist.mu = mean;
  dist.sigma = std::max(0.5, std::sqrt(var));
  return dist;
}

MonteCarloEstimate monte_carlo_p(std::int64_t Y, std::int64_t Z, std::int64_t m,
                                 std::int64_t trials, std::uint64_t seed) {
  if (trials < 1)
    throw DomainError("monte_carlo_p: trials must be >= 1");
  if (!(m >= 0 && m <= Y && Z >= 0 && Z <= Y))
    throw DomainError("monte_carlo_p: need 0 <= m <= Y and 0 <= Z <= Y");
  std::mt19937_64 rng(seed);
  std::int64_t hits = 0;
  for (std::int64_t t = 0; t < trials; ++t) {
    // draw one item at a time from the remaining pool; items [0, m) are marked
    std::int64_t marked_left = m;
    for (std::int64_t i = 0; i < Z; ++i) {
      std::uniform_int_distribution<std::int64_t> pick(0, Y - i - 1);
      if (pick(rng) < marked_left) {
        ++hits;
        break;
      }
    }
  }
  MonteCarloEstimate est;
  est.estimate = double(hits) / double(trials);
  est.standard_error = std::sqrt(est.estimate * (1.0 - est.estimate) / double(trials));
  return est;
}

SamplingReport make_report(const SamplingPlanConfig &plan, double m1, double mu, double sigma) {
  SamplingReport r;
  r.Y1 = plan.j1 * plan.y_s;
  r.Z1 = plan.Z;
  r.m1 = m1;
  r.n = plan.n;
  r.mu = mu;
  r.sigma = sigma;
  r.mode = plan.mode;
  r.p_old = p_old(plan.j1, plan.y_s, m1, plan.Z);
  const TargetedPlan t = p_new(sigma, plan.n, plan.y_s, m1, plan.Z, plan.mode);
  r.j2 = t.j2;
  r.Y2 = t.j2 * plan.y_s;
  r.Z2 = plan.Z;
  r.m2 = t.m2;
  r.p_new = t.p;
  r.delta_p = r.p_new - r.p_old;
  return r;
}

void write_report_csv(std::ostream &out, const std::vector<SamplingReport> &reports) {
  using text::format_double;
  out << "label,Y1,Z1,m1,n,mu,sigma,j2,Y2,Z2,m2,P_old,P_new,delta_P,mode\n";
  for (const auto &r : reports)
    out << r.label << ',' << format_double(r.Y1) << ',' << format_double(r.Z1) << ','
        << format_double(r.m1) << ',' << format_double(r.n) << ',' << format_double(r.mu) << ','
        << format_double(r.sigma) << ',' << r.j2 << ',' << format_double(r.Y2) << ','
        << format_double(r.Z2) << ',' << format_double(r.m2) << ',' << format_double(r.p_old)
        << ',' << format_double(r.p_new) << ',' << format_double(r.delta_p) << ','
        << to_string(r.mode) << '\n';
}

void write_report_text(std::ostream &out, const SamplingReport &r) {
  using text::format_fixed;
  if (!r.label.empty())
    out << "Sampling report: " << r.label << '\n';
  out << "  random plan     Y1 = " << format_fixed(r.Y1, 0) << ", Z1 = " << format_fixed(r.Z1, 0)
      << ", m1 = " << format_fixed(r.m1, 0) << '\n'
      << "  reject periods  mu = " << format_fixed(r.mu, 2) << ", sigma = "
      << format_fixed(r.sigma, 2) << '\n'
      << "  targeted plan   n = " << format_fixed(r.n, 3) << ", j2 = " << r.j2
      << ", periods in (" << format_fixed(r.interval_lo(), 2) << ", "
      << format_fixed(r.interval_hi(), 2) << ")\n"
      << "                  Y2 = " << format_fixed(r.Y2, 0) << ", Z2 = " << format_fixed(r.Z2, 0)
      << ", m2 = " << format_fixed(r.m2, 2) << '\n'
      << "  P_old = " << format_fixed(r.p_old, 4) << '\n'
      << "  P_new = " << format_fixed(r.p_new, 4) << '\n'
      << "  delta_P = " << format_fixed(r.delta_p, 4) << '\n'
      << "  mode = " << to_string(r.mode) << '\n';
}

} // namespace drawres
