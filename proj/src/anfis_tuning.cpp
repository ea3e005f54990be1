#include "drawres/anfis_tuning.hpp"

#include <cmath>
#include <random>

namespace drawres {

ColumnStats ColumnStats::of(const Ref<const MatrixXd> &X) {
  ColumnStats s;
  s.min = X.colwise().minCoeff().transpose();
  s.max = X.colwise().maxCoeff().transpose();
  const VectorXd mean = X.colwise().mean().transpose();
  s.sd.resize(X.cols());
  for (Index c = 0; c < X.cols(); ++c)
    s.sd[c] = std::sqrt((X.col(c).array() - mean[c]).square().mean());
  return s;
}

std::string ParamVector::describe(Index k) const {
  if (k < 0 || k >= values.size())
    return "out of range";
  if (k < premise_size()) {
    const Index r = k / (inputs * 3);
    const Index i = (k / 3) % inputs;
    static const char *names[] = {"a", "b", "c"};
    return "rule " + std::to_string(r) + " input " + std::to_string(i) + " " + names[k % 3];
  }
  const Index off = k - premise_size();
  const Index r = off / (inputs + 1);
  const Index j = off % (inputs + 1);
  return "rule " + std::to_string(r) +
         (j == inputs ? std::string(" bias") : " coef " + std::to_string(j));
}

ParamVector flatten(const FuzzyRuleBase &fis, const ColumnStats &stats) {
  const Index R = fis.rules(), d = fis.inputs();
  if (stats.sd.size() != d)
    throw DomainError("flatten: column statistics do not match the rule base width");
  ParamVector p;
  p.rules = R;
  p.inputs = d;
  const Index n = R * d * 3 + R * (d + 1);
  p.values.resize(n);
  p.bounds.lo.resize(n);
  p.bounds.hi.resize(n);
  Index k = 0;
  for (Index r = 0; r < R; ++r)
    for (Index i = 0; i < d; ++i) {
      const double sd = stats.sd[i];
      p.values[k] = fis.a(r, i);
      p.bounds.lo[k] = 1e-6;
      p.bounds.hi[k] = std::max(10.0 * sd, 1e-6);
      ++k;
      p.values[k] = fis.b(r, i);
      p.bounds.lo[k] = 0.5;
      p.bounds.hi[k] = 5.0;
      ++k;
      p.values[k] = fis.c(r, i);
      p.bounds.lo[k] = stats.min[i] - sd;
      p.bounds.hi[k] = stats.max[i] + sd;
      ++k;
    }
  for (Index r = 0; r < R; ++r) {
    for (Index j = 0; j <= d; ++j) {
      p.values[k] = j < d ? fis.coef(r, j) : fis.bias[r];
      p.bounds.lo[k] = -1e6;
      p.bounds.hi[k] = 1e6;
      ++k;
    }
  }
  return p;
}

FuzzyRuleBase unflatten(const ParamVector &p, bool *clipped) {
  const Index R = p.rules, d = p.inputs;
  const Index n = R * d * 3 + R * (d + 1);
  if (R < 1 || d < 1 || p.values.size() != n || p.bounds.dims() != n)
    throw DomainError("unflatten: parameter vector does not match its layout");
  const VectorXd v = p.bounds.clip(p.values);
  if (clipped)
    *clipped = v != p.values;
  FuzzyRuleBase fis = FuzzyRuleBase::zeros(R, d);
  Index k = 0;
  for (Index r = 0; r < R; ++r)
    for (Index i = 0; i < d; ++i) {
      fis.a(r, i) = v[k++];
      fis.b(r, i) = v[k++];
      fis.c(r, i) = v[k++];
    }
  for (Index r = 0; r < R; ++r) {
    for (Index j = 0; j < d; ++j)
      fis.coef(r, j) = v[k++];
    fis.bias[r] = v[k++];
  }
  return fis;
}

TuningResult anfis_metaheuristic_train(const Ref<const MatrixXd> &X, const Ref<const VectorXd> &y,
                                       const FuzzyRuleBase &init,
                                       const std::variant<GaParams, PsoParams> &method,
                                       const TuningOptions &options) {
  const int iters = std::visit([](const auto &m) { return m.max_iters; }, method);
  TuningResult out{init, {}};
  if (iters <= 0)
    return out;

  ParamVector layout = flatten(init, ColumnStats::of(X));
  // search box: flatten bounds for premises, a window around the start for consequents,
  // always wide enough to contain the starting point
  Bounds box = layout.bounds;
  for (Index k = layout.premise_size(); k < layout.values.size(); ++k) {
    const double v = layout.values[k];
    const double r = options.consequent_radius * std::max(1.0, std::abs(v));
    box.lo[k] = std::max(box.lo[k], v - r);
    box.hi[k] = std::min(box.hi[k], v + r);
  }
  box.lo = box.lo.cwiseMin(layout.values);
  box.hi = box.hi.cwiseMax(layout.values);
  layout.bounds = box;

  const Index dims = options.refit_consequents ? layout.premise_size() : layout.values.size();
  const Bounds search{box.lo.head(dims), box.hi.head(dims)};
  auto decode = [&](const VectorXd &v) {
    ParamVector p = layout;
    p.values.head(dims) = v;
    FuzzyRuleBase f = unflatten(p);
    if (options.refit_consequents)
      f = anfis_ls_consequents(std::move(f), X, y);
    return f;
  };
  auto objective = [&](const VectorXd &v) {
    try {
      const double e = std::sqrt(anfis_mse(decode(v), X, y));
      return std::isfinite(e) ? e : std::numeric_limits<double>::infinity();
    } catch (const DomainError &) {
      return std::numeric_limits<double>::infinity();
    }
  };

  const int pop = std::visit([](const auto &m) { return m.population; }, method);
  const std::uint64_t seed = std::visit([](const auto &m) { return m.seed; }, method);
  std::mt19937_64 rng(derive_seed(seed, 0xA1F5));
  std::normal_distribution<double> gauss(0.0, 1.0);
  const VectorXd start = layout.values.head(dims);
  const VectorXd width = search.hi - search.lo;
  std::vector<VectorXd> initial{start};
  for (int k = 1; k < pop; ++k) {
    VectorXd v = start;
    for (Index j = 0; j < v.size(); ++j)
      v[j] += options.perturbation * width[j] * gauss(rng);
    initial.push_back(search.clip(v));
  }

  OptimResult res = std::holds_alternative<GaParams>(method)
                        ? ga_minimize(objective, search, std::get<GaParams>(method), initial)
                        : pso_minimize(objective, search, std::get<PsoParams>(method), initial);
  out.fis = decode(res.best);
  out.history = std::move(res.history);
  return out;
}

} // namespace drawres
