#include "drawres/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <sstream>

#include "drawres/text.hpp"

namespace drawres {

namespace {

using text::format_double;

double to_real(const std::string &v) {
  const auto d = text::parse_double(v);
  if (!d || !std::isfinite(*d))
    throw DomainError("expected a finite number, got '" + v + "'");
  return *d;
}

long long to_integer(const std::string &v) {
  const double d = to_real(v);
  if (d != std::floor(d) || std::abs(d) > 9.0e15)
    throw DomainError("expected an integer, got '" + v + "'");
  return static_cast<long long>(d);
}

int to_int(const std::string &v) {
  const long long n = to_integer(v);
  if (n < std::numeric_limits<int>::min() || n > std::numeric_limits<int>::max())
    throw DomainError("integer out of range: '" + v + "'");
  return static_cast<int>(n);
}

std::uint64_t to_u64(const std::string &v) {
  const auto s = std::string(text::trim(v));
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    throw DomainError("expected an unsigned integer, got '" + v + "'");
  try {
    return std::stoull(s);
  } catch (const std::exception &) {
    throw DomainError("unsigned integer out of range: '" + v + "'");
  }
}

bool to_bool(const std::string &v) {
  if (v == "true" || v == "yes" || v == "on" || v == "1")
    return true;
  if (v == "false" || v == "no" || v == "off" || v == "0")
    return false;
  throw DomainError("expected true or false, got '" + v + "'");
}

std::vector<std::string> to_list(const std::string &v) {
  std::vector<std::string> out;
  if (text::trim(v).empty())
    return out;
  for (const auto &item : text::split(v, ','))
    out.emplace_back(text::trim(item));
  return out;
}

std::string join(const std::vector<std::string> &items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i)
    out += (i ? "," : "") + items[i];
  return out;
}

std::optional<double> to_optional_real(const std::string &v) {
  if (v == "none" || v.empty())
    return std::nullopt;
  return to_real(v);
}

std::string show(const std::optional<double> &v) { return v ? format_double(*v) : "none"; }
std::string show(bool v) { return v ? "true" : "false"; }
std::string show(double v) { return format_double(v); }
std::string show(int v) { return std::to_string(v); }

struct Key {
  std::string name;
  std::function<void(RunConfig &, const std::string &)> set;
  std::function<std::string(const RunConfig &)> get;
};

#define DRAWRES_REAL(key, field)                                                                  \
  Key {                                                                                           \
    key, [](RunConfig &c, const std::string &v) { c.field = to_real(v); },                        \
        [](const RunConfig &c) { return show(static_cast<double>(c.field)); }                     \
  }
#define DRAWRES_INT(key, field)                                                                   \
  Key {                                                                                           \
    key, [](RunConfig &c, const std::string &v) { c.field = to_int(v); },                         \
        [](const RunConfig &c) { return show(static_cast<int>(c.field)); }                        \
  }

const std::vector<Key> &keys() {
  static const std::vector<Key> table = {
      {"input.changelog",
       [](RunConfig &c, const std::string &v) {
         if (v.empty())
           c.changelog.reset();
         else
           c.changelog = v;
       },
       [](const RunConfig &c) { return c.changelog ? c.changelog->generic_string() : ""; }},
      {"input.synth", [](RunConfig &c, const std::string &v) { c.synth = to_bool(v); },
       [](const RunConfig &c) { return show(c.synth); }},

      DRAWRES_INT("synth.n_direct", synth_settings.design.n_direct),
      DRAWRES_REAL("synth.decay", synth_settings.design.decay),
      DRAWRES_INT("synth.n_square", synth_settings.design.n_square),
      DRAWRES_INT("synth.n_threshold", synth_settings.design.n_threshold),
      DRAWRES_INT("synth.n_product", synth_settings.design.n_product),
      DRAWRES_REAL("synth.square_weight", synth_settings.design.square_weight),
      DRAWRES_REAL("synth.threshold_weight", synth_settings.design.threshold_weight),
      DRAWRES_REAL("synth.product_weight", synth_settings.design.product_weight),
      DRAWRES_REAL("synth.linear_share", synth_settings.design.linear_share),
      DRAWRES_REAL("synth.nonlinear_share", synth_settings.design.nonlinear_share),
      DRAWRES_REAL("synth.target_sd", synth_settings.design.target_sd),
      DRAWRES_INT("synth.periods_per_shift", synth_settings.periods_per_shift),
      DRAWRES_INT("synth.points_per_period", synth_settings.points_per_period),
      DRAWRES_INT("synth.tail_points", synth_settings.tail_points),
      DRAWRES_REAL("synth.reject_mu", synth_settings.reject_cluster.mu),
      DRAWRES_REAL("synth.reject_sigma", synth_settings.reject_cluster.sigma),
      DRAWRES_INT("synth.reject_m1", synth_settings.reject_cluster.m1),
      DRAWRES_REAL("synth.change_probability", synth_settings.change_probability),
      DRAWRES_REAL("synth.persistence", synth_settings.persistence),
      DRAWRES_REAL("synth.counter_fault_rate", synth_settings.counter_fault_rate),
      DRAWRES_REAL("synth.reset_fault_rate", synth_settings.reset_fault_rate),
      DRAWRES_REAL("synth.cigarettes_per_step", synth_settings.cigarettes_per_step),

      {"ingest.step_ms",
       [](RunConfig &c, const std::string &v) { c.ingest.step = Millis{to_integer(v)}; },
       [](const RunConfig &c) { return std::to_string(c.ingest.step.count()); }},
      {"ingest.reference", [](RunConfig &c, const std::string &v) { c.ingest.reference = v; },
       [](const RunConfig &c) { return c.ingest.reference; }},
      {"ingest.counter", [](RunConfig &c, const std::string &v) { c.ingest.counter = v; },
       [](const RunConfig &c) { return c.ingest.counter; }},
      {"ingest.target", [](RunConfig &c, const std::string &v) { c.ingest.target = v; },
       [](const RunConfig &c) { return c.ingest.target; }},
      DRAWRES_REAL("ingest.counter_max_step", ingest.counter_max_step),
      DRAWRES_REAL("ingest.rise_limit", ingest.rise_limit),
      {"ingest.exclude", [](RunConfig &c, const std::string &v) { c.ingest.excluded = to_list(v); },
       [](const RunConfig &c) { return join(c.ingest.excluded); }},

      DRAWRES_REAL("split.train_fraction", train_fraction),
      {"split.mode",
       [](RunConfig &c, const std::string &v) {
         if (v == "chronological")
           c.split_mode = SplitMode::Chronological;
         else if (v == "random")
           c.split_mode = SplitMode::Random;
         else
           throw DomainError("expected chronological or random, got '" + v + "'");
       },
       [](const RunConfig &c) {
         return std::string(c.split_mode == SplitMode::Random ? "random" : "chronological");
       }},

      DRAWRES_REAL("features.f_lin", f_lin),
      DRAWRES_REAL("features.f_nonlin", f_nonlin),
      {"features.set",
       [](RunConfig &c, const std::string &v) { c.feature_set = feature_set_from_string(v); },
       [](const RunConfig &c) { return to_string(c.feature_set); }},
      DRAWRES_INT("features.trees", forest.n_trees),
      DRAWRES_INT("features.min_leaf", forest.min_leaf),
      DRAWRES_INT("features.max_features", forest.max_features),

      {"model.kind",
       [](RunConfig &c, const std::string &v) { c.model.kind = model_kind_from_string(v); },
       [](const RunConfig &c) { return to_string(c.model.kind); }},
      DRAWRES_INT("model.mlffnn.hidden", model.mlffnn.hidden),
      {"model.mlffnn.variant",
       [](RunConfig &c, const std::string &v) {
         c.model.mlffnn.variant = mlffnn_variant_from_string(v);
       },
       [](const RunConfig &c) { return to_string(c.model.mlffnn.variant); }},
      DRAWRES_INT("model.mlffnn.epochs", model.mlffnn.max_epochs),
      DRAWRES_REAL("model.mlffnn.learning_rate", model.mlffnn.learning_rate),
      DRAWRES_REAL("model.sc.radius", model.subtractive.radius),
      DRAWRES_REAL("model.sc.squash", model.subtractive.squash),
      DRAWRES_REAL("model.sc.accept_ratio", model.subtractive.accept_ratio),
      DRAWRES_REAL("model.sc.reject_ratio", model.subtractive.reject_ratio),
      DRAWRES_INT("model.sc.max_centers", model.subtractive.max_centers),
      DRAWRES_INT("model.fcm.clusters", model.fcm.clusters),
      DRAWRES_REAL("model.fcm.exponent", model.fcm.exponent),
      DRAWRES_INT("model.fcm.max_iter", model.fcm.max_iter),
      DRAWRES_REAL("model.fcm.tol", model.fcm.tol),
      DRAWRES_INT("model.hybrid.epochs", model.hybrid.epochs),
      DRAWRES_REAL("model.hybrid.learning_rate", model.hybrid.learning_rate),
      DRAWRES_INT("model.ga.population", model.ga.population),
      DRAWRES_INT("model.ga.max_iters", model.ga.max_iters),
      DRAWRES_REAL("model.ga.crossover_fraction", model.ga.crossover_fraction),
      DRAWRES_REAL("model.ga.mutation_fraction", model.ga.mutation_fraction),
      DRAWRES_REAL("model.ga.mutation_rate", model.ga.mutation_rate),
      DRAWRES_REAL("model.ga.mutation_scale", model.ga.mutation_scale),
      DRAWRES_INT("model.pso.population", model.pso.population),
      DRAWRES_INT("model.pso.max_iters", model.pso.max_iters),
      DRAWRES_REAL("model.pso.inertia", model.pso.inertia),
      DRAWRES_REAL("model.pso.personal", model.pso.personal),
      DRAWRES_REAL("model.pso.global", model.pso.global),
      DRAWRES_REAL("model.tuning.consequent_radius", model.tuning.consequent_radius),
      DRAWRES_REAL("model.tuning.perturbation", model.tuning.perturbation),
      {"model.tuning.refit_consequents",
       [](RunConfig &c, const std::string &v) { c.model.tuning.refit_consequents = to_bool(v); },
       [](const RunConfig &c) { return show(c.model.tuning.refit_consequents); }},
      DRAWRES_INT("model.gmdh.max_neurons", model.gmdh.max_neurons),
      DRAWRES_INT("model.gmdh.max_layers", model.gmdh.max_layers),
      DRAWRES_REAL("model.gmdh.pressure", model.gmdh.pressure),
      DRAWRES_REAL("model.gmdh.fit_fraction", model.gmdh.fit_fraction),

      DRAWRES_REAL("limits.mu1", limits.mu1),
      DRAWRES_REAL("limits.sigma1", limits.sigma1),
      DRAWRES_REAL("limits.n", limits.n),

      DRAWRES_INT("sampling.j1", sampling.j1),
      DRAWRES_REAL("sampling.y_s", sampling.y_s),
      DRAWRES_REAL("sampling.Z", sampling.Z),
      DRAWRES_REAL("sampling.n", sampling.n),
      {"sampling.mode",
       [](RunConfig &c, const std::string &v) { c.sampling.mode = coverage_mode_from_string(v); },
       [](const RunConfig &c) { return to_string(c.sampling.mode); }},
      {"sampling.m1",
       [](RunConfig &c, const std::string &v) { c.sampling_override.m1 = to_optional_real(v); },
       [](const RunConfig &c) { return show(c.sampling_override.m1); }},
      {"sampling.mu",
       [](RunConfig &c, const std::string &v) { c.sampling_override.mu = to_optional_real(v); },
       [](const RunConfig &c) { return show(c.sampling_override.mu); }},
      {"sampling.sigma",
       [](RunConfig &c, const std::string &v) { c.sampling_override.sigma = to_optional_real(v); },
       [](const RunConfig &c) { return show(c.sampling_override.sigma); }},

      {"seed", [](RunConfig &c, const std::string &v) { c.seed = to_u64(v); },
       [](const RunConfig &c) { return std::to_string(c.seed); }},
      {"output.dir", [](RunConfig &c, const std::string &v) { c.output_dir = v; },
       [](const RunConfig &c) { return c.output_dir.generic_string(); }},
  };
  return table;
}

#undef DRAWRES_REAL
#undef DRAWRES_INT

void require(bool ok, const std::string &key, const std::string &what) {
  if (!ok)
    throw ConfigError(key, what);
}

bool open_unit(double v) { return v > 0.0 && v < 1.0; }

} // namespace

void set_config_value(RunConfig &config, const std::string &key, const std::string &value) {
  for (const auto &k : keys()) {
    if (k.name != key)
      continue;
    try {
      k.set(config, value);
    } catch (const ConfigError &) {
      throw;
    } catch (const Error &e) {
      throw ConfigError(key, e.what());
    }
    return;
  }
  throw ConfigError(key, "unknown configuration key");
}

RunConfig parse_config(std::istream &in, const std::filesystem::path &base_dir) {
  RunConfig config;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    const auto body = text::trim(line);
    if (body.empty())
      continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos)
      throw ParseError(number, "expected 'key = value'");
    const std::string key(text::trim(body.substr(0, eq)));
    const std::string value(text::trim(body.substr(eq + 1)));
    if (key.empty())
      throw ParseError(number, "missing key before '='");
    set_config_value(config, key, value);
  }
  if (config.changelog && config.changelog->is_relative() && !base_dir.empty())
    config.changelog = base_dir / *config.changelog;
  config.validate();
  return config;
}

RunConfig load_config(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw Error("cannot open config file " + path.string());
  return parse_config(in, path.parent_path());
}

void RunConfig::validate() const {
  if (synth == changelog.has_value())
    throw ConfigError("input", "set exactly one of input.changelog and input.synth = true");
  if (synth) {
    const auto &s = synth_settings;
    require(open_unit(s.design.linear_share), "synth.linear_share", "must lie in (0, 1)");
    require(s.design.nonlinear_share >= 0.0 && s.design.nonlinear_share < 1.0,
            "synth.nonlinear_share", "must lie in [0, 1)");
    require(s.design.linear_share + s.design.nonlinear_share <= 1.0, "synth.nonlinear_share",
            "linear and nonlinear shares exceed 1");
    require(s.design.target_sd > 0.0, "synth.target_sd", "must be positive");
    require(s.design.square_weight > 0.0, "synth.square_weight", "must be positive");
    require(s.design.threshold_weight > 0.0, "synth.threshold_weight", "must be positive");
    require(s.design.product_weight > 0.0, "synth.product_weight", "must be positive");
    require(s.periods_per_shift > 0, "synth.periods_per_shift", "must be positive");
    require(s.points_per_period > 0, "synth.points_per_period", "must be positive");
    require(s.tail_points >= 2, "synth.tail_points", "must be at least 2");
  }
  require(ingest.step.count() > 0, "ingest.step_ms", "must be positive");
  require(ingest.counter_max_step > 0.0, "ingest.counter_max_step", "must be positive");
  require(ingest.rise_limit > 0.0, "ingest.rise_limit", "must be positive");
  require(open_unit(train_fraction), "split.train_fraction", "must lie in (0, 1)");
  require(open_unit(f_lin), "features.f_lin", "must lie in (0, 1)");
  require(open_unit(f_nonlin), "features.f_nonlin", "must lie in (0, 1)");
  require(forest.n_trees >= 1, "features.trees", "must be at least 1");
  require(forest.min_leaf >= 1, "features.min_leaf", "must be at least 1");
  require(forest.max_features >= 0, "features.max_features", "must not be negative");
  require(model.mlffnn.hidden >= 1, "model.mlffnn.hidden", "must be at least 1");
  require(model.mlffnn.max_epochs >= 1, "model.mlffnn.epochs", "must be at least 1");
  require(model.subtractive.radius > 0.0, "model.sc.radius", "must be positive");
  require(model.fcm.clusters >= 1, "model.fcm.clusters", "must be at least 1");
  require(model.fcm.exponent > 1.0, "model.fcm.exponent", "must exceed 1");
  require(model.hybrid.epochs >= 0, "model.hybrid.epochs", "must not be negative");
  require(model.ga.population >= 2, "model.ga.population", "must be at least 2");
  require(model.ga.max_iters >= 1, "model.ga.max_iters", "must be at least 1");
  require(model.pso.population >= 1, "model.pso.population", "must be at least 1");
  require(model.pso.max_iters >= 1, "model.pso.max_iters", "must be at least 1");
  require(model.gmdh.max_neurons >= 1, "model.gmdh.max_neurons", "must be at least 1");
  require(model.gmdh.max_layers >= 1, "model.gmdh.max_layers", "must be at least 1");
  require(model.gmdh.pressure >= 0.0 && model.gmdh.pressure <= 1.0, "model.gmdh.pressure",
          "must lie in [0, 1]");
  require(open_unit(model.gmdh.fit_fraction), "model.gmdh.fit_fraction", "must lie in (0, 1)");
  require(limits.sigma1 > 0.0, "limits.sigma1", "must be positive");
  require(limits.n > 0.0, "limits.n", "must be positive");
  require(sampling.j1 >= 1, "sampling.j1", "must be at least 1");
  require(sampling.y_s >= 1.0, "sampling.y_s", "must be at least 1");
  require(sampling.Z >= 1.0, "sampling.Z", "must be at least 1");
  require(sampling.n > 0.0, "sampling.n", "must be positive");
  const auto &o = sampling_override;
  require(!o.m1 || *o.m1 >= 0.0, "sampling.m1", "must not be negative");
  require(!o.sigma || *o.sigma > 0.0, "sampling.sigma", "must be positive");
  require(o.m1.has_value() == o.sigma.has_value(), o.m1 ? "sampling.sigma" : "sampling.m1",
          "sampling.m1 and sampling.sigma are set together");
}

SynthConfig RunConfig::synth_config() const {
  SynthConfig c = default_synth_config(seed, synth_settings.design);
  const auto &s = synth_settings;
  c.periods_per_shift = s.periods_per_shift;
  c.points_per_period = s.points_per_period;
  c.tail_points = s.tail_points;
  c.step = ingest.step;
  c.reject_cluster = s.reject_cluster;
  c.limits = limits;
  c.change_probability = s.change_probability;
  c.persistence = s.persistence;
  c.counter_fault_rate = s.counter_fault_rate;
  c.reset_fault_rate = s.reset_fault_rate;
  c.cigarettes_per_step = s.cigarettes_per_step;
  c.base = limits.mu1;
  // long shifts push later shifts back so a ten-minute break remains
  const Millis length = c.step * c.shift_points();
  for (std::size_t k = 1; k < c.shift_starts.size(); ++k) {
    const Instant earliest = c.shift_starts[k - 1] + length + std::chrono::minutes(10);
    c.shift_starts[k] = std::max(c.shift_starts[k], earliest);
  }
  return c;
}

std::string canonical_text(const RunConfig &config) {
  std::ostringstream out;
  for (const auto &k : keys())
    out << k.name << " = " << k.get(config) << '\n';
  return out.str();
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t hash) {
  for (unsigned char ch : bytes) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string hex64(std::uint64_t v) {
  static const char *digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4)
    s[static_cast<std::size_t>(i)] = digits[v & 0xF];
  return s;
}

} // namespace drawres
