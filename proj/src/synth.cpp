#include "drawres/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <set>

#include "drawres/text.hpp"

namespace drawres {

namespace {

constexpr double kDeadBand = 0.5;

// Moments of max(0, |x| - kDeadBand) for standard normal x.
double threshold_mean() {
  const double c = kDeadBand;
  const double pdf = std::exp(-0.5 * c * c) / std::sqrt(2.0 * M_PI);
  return 2.0 * (pdf - c * 0.5 * std::erfc(c / std::sqrt(2.0)));
}

double threshold_var() {
  const double c = kDeadBand;
  const double pdf = std::exp(-0.5 * c * c) / std::sqrt(2.0 * M_PI);
  const double second = 2.0 * ((1.0 + c * c) * 0.5 * std::erfc(c / std::sqrt(2.0)) - c * pdf);
  const double m = threshold_mean();
  return second - m * m;
}

double quantize(double z) { return std::round(z * 100.0) / 100.0; }

enum Stream : std::uint64_t {
  kPlanting = 1,
  kNoise,
  kRejects,
  kFaults,
  kScales,
  kIndicators = 1000,
};

// Values of every indicator in standardized units; the planted model reads these.
struct Planted {
  std::vector<Index> direct;
  std::vector<double> beta;
  double beta_sq = 0.0;
  struct Term {
    Transform t;
    Index a, b;
    double gamma;
  };
  std::vector<Term> terms;
};

double signal(const Planted &p, const VectorXd &x, double base, double threshold_mu) {
  double y = base;
  for (std::size_t j = 0; j < p.direct.size(); ++j)
    y += p.beta[j] * x[p.direct[j]];
  for (const auto &t : p.terms) {
    const double u = x[t.a];
    switch (t.t) {
    case Transform::Square:
      y += t.gamma * (u * u - 1.0);
      break;
    case Transform::Threshold:
      y += t.gamma * (std::max(0.0, std::abs(u) - kDeadBand) - threshold_mu);
      break;
    case Transform::ProductPair:
      y += t.gamma * u * x[t.b];
      break;
    }
  }
  return y;
}

} // namespace

std::string to_string(Transform t) {
  switch (t) {
  case Transform::Square:
    return "square";
  case Transform::Threshold:
    return "threshold";
  case Transform::ProductPair:
    return "product-pair";
  }
  return "?";
}

Transform transform_from_string(const std::string &text) {
  if (text == "square")
    return Transform::Square;
  if (text == "threshold")
    return Transform::Threshold;
  if (text == "product-pair")
    return Transform::ProductPair;
  throw DomainError("unknown transform '" + text + "'");
}

std::vector<std::string> SynthConfig::indicator_ids() const {
  std::vector<std::string> ids;
  const char prefix[] = {'A', 'B', 'C', 'D'};
  for (std::size_t g = 0; g < group_sizes.size(); ++g)
    for (int k = 1; k <= group_sizes[g]; ++k) {
      std::string id(1, prefix[g]);
      if (k < 10)
        id += '0';
      id += std::to_string(k);
      ids.push_back(id);
    }
  return ids;
}

void SynthConfig::validate() const {
  for (int g : group_sizes)
    if (g < 0)
      throw DomainError("synth.group_sizes: negative group size");
  const auto ids = indicator_ids();
  if (ids.empty())
    throw DomainError("synth.group_sizes: no indicators");
  const std::set<std::string> known(ids.begin(), ids.end());
  std::set<std::string> used;
  auto claim = [&](const std::string &id, const char *field) {
    if (!known.count(id))
      throw DomainError(std::string(field) + ": unknown indicator '" + id + "'");
    if (!used.insert(id).second)
      throw DomainError(std::string(field) + ": indicator '" + id + "' planted twice");
  };
  for (const auto &d : planted_direct)
    claim(d.indicator, "synth.planted_direct");
  for (const auto &p : planted_potential) {
    claim(p.indicator, "synth.planted_potential");
    if (p.transform == Transform::ProductPair)
      claim(p.partner, "synth.planted_potential");
  }
  if (!(noise_sd >= 0.0))
    throw DomainError("synth.noise_sd: must be >= 0");
  if (periods_per_shift < 1 || points_per_period < 1)
    throw DomainError("synth.periods_per_shift/points_per_period: must be >= 1");
  if (step.count() <= 0)
    throw DomainError("synth.step: must be positive");
  if (tail_points < 1)
    throw DomainError("synth.tail_points: must be >= 1");
  if (shift_starts.empty())
    throw DomainError("synth.shift_starts: at least one shift required");
  Instant prev_end = start;
  for (std::size_t s = 0; s < shift_starts.size(); ++s) {
    const Instant t = shift_starts[s];
    if (t < prev_end || (s > 0 && t <= prev_end))
      throw DomainError("synth.shift_starts: shifts overlap or start before the grid");
    if ((t - start) % step != Millis{0})
      throw DomainError("synth.shift_starts: shift start off the grid");
    prev_end = t + step * shift_points();
  }
  const auto &rc = reject_cluster;
  if (rc.m1 < 0 || rc.m1 > shift_points())
    throw DomainError("synth.reject_cluster.m1: must lie in [0, points per shift]");
  if (!(rc.sigma > 0.0) || rc.mu < 1.0 || rc.mu > periods_per_shift)
    throw DomainError("synth.reject_cluster: need sigma > 0 and 1 <= mu <= periods");
  if (rc.m1 > 0 && planted_direct.empty())
    throw DomainError("synth.reject_cluster.m1: rejects need at least one planted direct feature");
  limits.validate();
  if (!(change_probability >= 0.0 && change_probability <= 1.0))
    throw DomainError("synth.change_probability: must lie in [0, 1]");
  if (!(std::abs(persistence) < 1.0))
    throw DomainError("synth.persistence: must lie in (-1, 1)");
  if (!(counter_fault_rate >= 0.0 && counter_fault_rate <= 1.0) ||
      !(reset_fault_rate >= 0.0 && reset_fault_rate <= 1.0))
    throw DomainError("synth fault rates must lie in [0, 1]");
  if (!(cigarettes_per_step >= 1.0 && cigarettes_per_step <= 1800.0))
    throw DomainError("synth.cigarettes_per_step: must lie in [1, 1800]");
}

SynthConfig default_synth_config(std::uint64_t seed, const PlantedDesign &design) {
  SynthConfig c;
  c.seed = seed;
  c.start = parse_instant("2022/02/07 06:50:00.000");
  c.shift_starts = {parse_instant("2022/02/07 07:00:00.000"),
                    parse_instant("2022/02/07 12:30:00.000")};
  std::vector<std::string> ids = c.indicator_ids();
  const int needed = design.n_direct + design.n_square + design.n_threshold + 2 * design.n_product;
  if (design.n_direct < 0 || design.n_square < 0 || design.n_threshold < 0 ||
      design.n_product < 0 || needed > static_cast<int>(ids.size()))
    throw DomainError("default_synth_config: planted design does not fit the catalog");

  std::mt19937_64 rng(derive_seed(seed, kPlanting));
  std::shuffle(ids.begin(), ids.end(), rng);
  std::uniform_int_distribution<int> coin(0, 1);
  auto sign = [&] { return coin(rng) ? 1.0 : -1.0; };
  const double var = design.target_sd * design.target_sd;

  // geometrically decaying linear coefficients scaled to the linear variance share
  if (!(design.decay > 0.0 && design.decay <= 1.0))
    throw DomainError("default_synth_config: decay must lie in (0, 1]");
  std::vector<double> grade(static_cast<std::size_t>(design.n_direct));
  for (int j = 0; j < design.n_direct; ++j)
    grade[static_cast<std::size_t>(j)] = std::pow(design.decay, j);
  const double grade_sq = std::inner_product(grade.begin(), grade.end(), grade.begin(), 0.0);
  std::size_t next = 0;
  for (int j = 0; j < design.n_direct; ++j) {
    const double b = grade[static_cast<std::size_t>(j)] *
                     std::sqrt(design.linear_share * var / std::max(grade_sq, 1e-300));
    c.planted_direct.push_back({ids[next++], sign() * b});
  }

  const double var_square = 2.0;
  const double var_threshold = threshold_var();
  const double units = design.square_weight * design.n_square +
                       design.threshold_weight * design.n_threshold +
                       design.product_weight * design.n_product;
  const double unit = units > 0 ? design.nonlinear_share * var / units : 0.0;
  for (int k = 0; k < design.n_square; ++k)
    c.planted_potential.push_back(
        {ids[next++], Transform::Square, sign() * std::sqrt(design.square_weight * unit / var_square), ""});
  for (int k = 0; k < design.n_threshold; ++k)
    c.planted_potential.push_back(
        {ids[next++], Transform::Threshold, sign() * std::sqrt(design.threshold_weight * unit / var_threshold), ""});
  for (int k = 0; k < design.n_product; ++k) {
    const std::string a = ids[next++];
    c.planted_potential.push_back({a, Transform::ProductPair, sign() * std::sqrt(design.product_weight * unit), ids[next++]});
  }
  const double noise_share = std::max(0.0, 1.0 - design.linear_share - design.nonlinear_share);
  c.noise_sd = std::sqrt(noise_share * var);
  return c;
}

SynthOutput generate(const SynthConfig &config) {
  config.validate();
  const std::vector<std::string> ids = config.indicator_ids();
  const Index d = static_cast<Index>(ids.size());
  std::map<std::string, Index> column_of;
  for (Index j = 0; j < d; ++j)
    column_of[ids[static_cast<std::size_t>(j)]] = j;

  Planted planted;
  for (const auto &p : config.planted_direct) {
    planted.direct.push_back(column_of.at(p.indicator));
    planted.beta.push_back(p.coefficient);
    planted.beta_sq += p.coefficient * p.coefficient;
  }
  for (const auto &p : config.planted_potential)
    planted.terms.push_back({p.transform, column_of.at(p.indicator),
                             p.transform == Transform::ProductPair ? column_of.at(p.partner) : 0,
                             p.coefficient});
  const double tm = threshold_mean();

  // grid layout
  const int L = config.shift_points();
  const Instant last_end = config.shift_starts.back() + config.step * L;
  const Index n = (last_end - config.start) / config.step + config.tail_points;
  std::vector<int> shift_of(static_cast<std::size_t>(n), -1);
  std::vector<Index> shift_begin;
  for (std::size_t s = 0; s < config.shift_starts.size(); ++s) {
    const Index b = (config.shift_starts[s] - config.start) / config.step;
    shift_begin.push_back(b);
    for (Index k = b; k < b + L; ++k)
      shift_of[static_cast<std::size_t>(k)] = static_cast<int>(s);
  }

  GroundTruth truth;
  truth.period_id.assign(static_cast<std::size_t>(n), 0);
  for (std::size_t s = 0; s < shift_begin.size(); ++s)
    for (int k = 0; k < L; ++k)
      truth.period_id[static_cast<std::size_t>(shift_begin[s] + k)] =
          k / config.points_per_period + 1;

  // reject positions: period ids from a discretized normal, points uniform within a period
  std::vector<bool> reject_point(static_cast<std::size_t>(n), false);
  {
    std::mt19937_64 rng(derive_seed(config.seed, kRejects));
    std::normal_distribution<double> gauss(0.0, 1.0);
    const auto &rc = config.reject_cluster;
    const int P = config.periods_per_shift, ppp = config.points_per_period;
    for (Index b : shift_begin) {
      std::vector<int> used(static_cast<std::size_t>(P), 0);
      for (int r = 0; r < rc.m1; ++r) {
        int id = 0;
        for (long tries = 0;; ++tries) {
          if (tries > 10'000'000)
            throw DomainError("synth: cannot place rejects; widen sigma or add points per period");
          id = static_cast<int>(std::lround(rc.mu + rc.sigma * gauss(rng)));
          if (id >= 1 && id <= P && used[static_cast<std::size_t>(id - 1)] < ppp)
            break;
        }
        // pick the j-th free slot of that period
        const int free_slots = ppp - used[static_cast<std::size_t>(id - 1)];
        int pick = std::uniform_int_distribution<int>(0, free_slots - 1)(rng);
        for (int k = 0; k < ppp; ++k) {
          const auto idx = static_cast<std::size_t>(b + (id - 1) * ppp + k);
          if (reject_point[idx])
            continue;
          if (pick-- == 0) {
            reject_point[idx] = true;
            break;
          }
        }
        ++used[static_cast<std::size_t>(id - 1)];
      }
    }
  }

  // indicator scales: value = center + scale * x
  VectorXd center(d), scale(d);
  {
    std::mt19937_64 rng(derive_seed(config.seed, kScales));
    std::uniform_int_distribution<int> mag(1, 4);
    std::uniform_int_distribution<int> digits(10, 99);
    for (Index j = 0; j < d; ++j) {
      const double m = std::pow(10.0, mag(rng));
      center[j] = digits(rng) * m / 10.0;
      scale[j] = center[j] / 20.0;
    }
  }

  std::vector<std::mt19937_64> ind_rng;
  for (Index j = 0; j < d; ++j)
    ind_rng.emplace_back(derive_seed(config.seed, kIndicators + static_cast<std::uint64_t>(j)));
  std::mt19937_64 noise_rng(derive_seed(config.seed, kNoise));
  std::mt19937_64 fault_rng(derive_seed(config.seed, kFaults));
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double phi = config.persistence;
  const double innov = std::sqrt(1.0 - phi * phi);
  const double lo = config.limits.lower(), hi = config.limits.upper();
  const double half = 0.5 * (hi - lo);

  VectorXd latent(d), held(d);
  for (Index j = 0; j < d; ++j) {
    latent[j] = gauss(ind_rng[static_cast<std::size_t>(j)]);
    held[j] = quantize(latent[j]);
  }
  double noise = 0.0;
  MatrixXd X(n, d);
  truth.draw_resistance.resize(n);
  VectorXd counter = VectorXd::Zero(n), hours = VectorXd::Zero(n);

  // moves the direct features so the signal changes by delta
  auto push = [&](VectorXd &x, double delta) {
    for (std::size_t j = 0; j < planted.direct.size(); ++j)
      x[planted.direct[j]] = quantize(x[planted.direct[j]] + delta * planted.beta[j] / planted.beta_sq);
  };

  for (Index k = 0; k < n; ++k) {
    const int s = shift_of[static_cast<std::size_t>(k)];
    if (s >= 0) {
      for (Index j = 0; j < d; ++j) {
        auto &r = ind_rng[static_cast<std::size_t>(j)];
        latent[j] = phi * latent[j] + innov * gauss(r);
        if (unit(r) < config.change_probability)
          held[j] = quantize(latent[j]);
      }
      noise = config.noise_sd * gauss(noise_rng);
    }
    VectorXd x = held;
    double y = signal(planted, x, config.base, tm) + noise;
    if (s >= 0 && !planted.direct.empty()) {
      if (reject_point[static_cast<std::size_t>(k)]) {
        const double side = unit(noise_rng) < 0.5 ? -1.0 : 1.0;
        const double target = config.base + side * (half + 2.0 + 6.0 * unit(noise_rng));
        for (int attempt = 0; attempt < 4 && y >= lo && y <= hi; ++attempt) {
          push(x, target - y);
          y = signal(planted, x, config.base, tm) + noise;
        }
        if (y >= lo && y <= hi)
          throw DomainError("synth: could not place a reject; direct coefficients too small");
      } else if (y < lo || y > hi) {
        // natural exceedances are pulled back so rejects are exactly the planted ones
        const double target = config.base + (2.0 * unit(noise_rng) - 1.0) * 0.75 * half;
        for (int attempt = 0; attempt < 4 && (y < lo || y > hi); ++attempt) {
          push(x, target - y);
          y = signal(planted, x, config.base, tm) + noise;
        }
      }
    }
    X.row(k) = x.transpose();
    truth.draw_resistance[k] = y;
  }

  // counter and hours worked
  for (std::size_t s = 0; s < shift_begin.size(); ++s) {
    double total = 0.0;
    std::uniform_real_distribution<double> jitter(0.9, 1.1);
    for (int k = 0; k < L; ++k) {
      total += std::round(config.cigarettes_per_step * jitter(fault_rng));
      counter[shift_begin[s] + k] = total;
      const double h = quantize((k + 1) * (config.step.count() / 3.6e6));
      if (k > 0 && unit(fault_rng) < config.reset_fault_rate) {
        hours[shift_begin[s] + k] = 0.0;
        ++truth.reset_faults;
      } else {
        hours[shift_begin[s] + k] = h;
      }
    }
  }
  std::uniform_real_distribution<double> spike(20000.0, 80000.0);
  for (Index k = 1; k + 1 < n; ++k) {
    // interior idle points only, so shift boundaries stay sharp
    if (shift_of[static_cast<std::size_t>(k)] >= 0 || shift_of[static_cast<std::size_t>(k - 1)] >= 0 ||
        shift_of[static_cast<std::size_t>(k + 1)] >= 0 || counter[k - 1] != 0.0)
      continue;
    if (unit(fault_rng) < config.counter_fault_rate) {
      counter[k] = std::round(spike(fault_rng));
      ++truth.counter_faults;
    }
  }

  truth.reject.assign(static_cast<std::size_t>(n), false);
  for (Index k = 0; k < n; ++k)
    if (shift_of[static_cast<std::size_t>(k)] >= 0) {
      const double y = truth.draw_resistance[k];
      truth.reject[static_cast<std::size_t>(k)] = y < lo || y > hi;
    }
  for (const auto &p : config.planted_direct)
    truth.direct.push_back(p.indicator);
  for (const auto &p : config.planted_potential) {
    truth.potential.push_back(p.indicator);
    if (p.transform == Transform::ProductPair)
      truth.potential.push_back(p.partner);
  }
  for (Index b : shift_begin) {
    ShiftWindow w;
    w.start = config.start + config.step * b;
    w.end = w.start + config.step * L;
    w.label = hour_of_day(w.start) < 12 ? ShiftLabel::Morning : ShiftLabel::Mid;
    truth.shifts.push_back(w);
  }

  // dense frame with columns in id order
  SynthOutput out;
  AlignedFrame &frame = out.dense;
  frame.grid_start = config.start;
  frame.step = config.step;
  std::vector<std::pair<std::string, VectorXd>> cols;
  for (Index j = 0; j < d; ++j)
    cols.emplace_back(ids[static_cast<std::size_t>(j)],
                      (center[j] + scale[j] * X.col(j).array()).matrix());
  cols.emplace_back(kCounterId, counter);
  cols.emplace_back(kHoursId, hours);
  cols.emplace_back(kTargetId, truth.draw_resistance);
  std::sort(cols.begin(), cols.end(),
            [](const auto &a, const auto &b) { return a.first < b.first; });
  frame.values.resize(n, static_cast<Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    frame.names.push_back(cols[c].first);
    frame.values.col(static_cast<Index>(c)) = cols[c].second;
  }

  for (Index k = 0; k < n; ++k) {
    const Instant t = frame.time_at(k);
    for (Index c = 0; c < frame.values.cols(); ++c)
      if (k == 0 || frame.values(k, c) != frame.values(k - 1, c))
        out.records.push_back({t, frame.names[static_cast<std::size_t>(c)], frame.values(k, c)});
  }
  out.truth = std::move(truth);
  return out;
}

void write_truth_csv(std::ostream &out, const GroundTruth &truth, const AlignedFrame &dense) {
  out << "timestamp,draw_resistance,reject,period\n";
  for (Index k = 0; k < truth.draw_resistance.size(); ++k) {
    const auto i = static_cast<std::size_t>(k);
    out << format_instant(dense.time_at(k)) << ',' << text::format_double(truth.draw_resistance[k])
        << ',' << (truth.reject[i] ? 1 : 0) << ',' << truth.period_id[i] << '\n';
  }
}

void write_planted_csv(std::ostream &out, const SynthConfig &config) {
  out << "indicator,role,transform,partner,coefficient\n";
  for (const auto &p : config.planted_direct)
    out << p.indicator << ",direct,linear,," << text::format_double(p.coefficient) << '\n';
  for (const auto &p : config.planted_potential)
    out << p.indicator << ",potential," << to_string(p.transform) << ',' << p.partner << ','
        << text::format_double(p.coefficient) << '\n';
}

} // namespace drawres
