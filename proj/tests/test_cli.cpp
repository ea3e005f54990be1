#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "drawres/app.hpp"
#include "drawres/config.hpp"
#include "drawres/text.hpp"

using namespace drawres;
namespace fs = std::filesystem;

namespace {

const char *kSmallRun = R"(# small synthetic run
input.synth = true
seed = 3
synth.periods_per_shift = 20
synth.points_per_period = 20
synth.reject_mu = 10
synth.reject_m1 = 20
model.kind = anfis-fcm
model.hybrid.epochs = 5
sampling.j1 = 20
sampling.y_s = 6660
)";

RunConfig parse(const std::string &text) {
  std::istringstream in(text);
  return parse_config(in);
}

fs::path scratch(const std::string &name) {
  const fs::path p = fs::temp_directory_path() / ("drawres_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string config_hash(const RunConfig &c) { return hex64(fnv1a(canonical_text(c))); }

} // namespace

TEST_CASE("config parsing") {
  SUBCASE("values land in the right fields") {
    const RunConfig c = parse(std::string(kSmallRun) + "features.f_lin = 0.4\nlimits.n = 3.5\n");
    CHECK(c.synth);
    CHECK(c.seed == 3);
    CHECK(c.f_lin == 0.4);
    CHECK(c.limits.n == 3.5);
    CHECK(c.sampling.j1 == 20);
    CHECK(c.model.kind == ModelKind::AnfisFcm);
    CHECK(c.model.hybrid.epochs == 5);
    CHECK_NOTHROW(c.validate());
  }
  SUBCASE("unknown keys name the key path") {
    try {
      parse("input.synth = true\nmodel.gmdh.depth = 3\n");
      FAIL("expected a config error");
    } catch (const ConfigError &e) {
      CHECK(e.key() == "model.gmdh.depth");
      CHECK(std::string(e.what()).find("model.gmdh.depth") != std::string::npos);
    }
  }
  SUBCASE("invalid values name the key path") {
    for (const auto &[line, key] : std::vector<std::pair<std::string, std::string>>{
             {"features.f_lin = lots", "features.f_lin"},
             {"model.kind = lstm", "model.kind"},
             {"sampling.mode = eq20", "sampling.mode"},
             {"split.mode = shuffled", "split.mode"},
             {"model.fcm.clusters = 2.5", "model.fcm.clusters"}}) {
      CAPTURE(line);
      try {
        parse("input.synth = true\n" + line + "\n");
        FAIL("expected a config error");
      } catch (const ConfigError &e) {
        CHECK(e.key() == key);
      }
    }
  }
  SUBCASE("a line without a value is a syntax error") {
    try {
      parse("input.synth = true\n\nseed 4\n");
      FAIL("expected a parse error");
    } catch (const ParseError &e) {
      CHECK(e.line() == 3);
    }
  }
  SUBCASE("input sources and fractions are validated") {
    CHECK_THROWS_AS(parse("seed = 1\n").validate(), ConfigError);
    CHECK_THROWS_AS(parse("input.synth = true\ninput.changelog = log.csv\n").validate(), ConfigError);
    CHECK_THROWS_AS(parse("input.synth = true\nfeatures.f_lin = 1.0\n").validate(), ConfigError);
    CHECK_THROWS_AS(parse("input.synth = true\nsplit.train_fraction = 0\n").validate(), ConfigError);
    CHECK_THROWS_AS(parse("input.synth = true\nsampling.m1 = 100\n").validate(), ConfigError);
  }
  SUBCASE("relative input paths resolve against the config directory") {
    std::istringstream in("input.changelog = data/log.csv\n");
    const RunConfig c = parse_config(in, "/srv/runs");
    REQUIRE(c.changelog);
    CHECK(*c.changelog == fs::path("/srv/runs/data/log.csv"));
  }
}

TEST_CASE("config hash tracks every field") {
  const RunConfig base = parse(kSmallRun);
  const std::string h = config_hash(base);
  CHECK(config_hash(parse(kSmallRun)) == h);
  CHECK(config_hash(parse(canonical_text(base))) == h);
  CHECK(canonical_text(parse(canonical_text(base))) == canonical_text(base));
  // comments and spacing are not fields
  CHECK(config_hash(parse(std::string("# note\n\n") + kSmallRun + "  seed=3  # same\n")) == h);

  const std::vector<std::pair<std::string, std::string>> edits = {
      {"seed", "4"},
      {"output.dir", "elsewhere"},
      {"synth.decay", "0.7"},
      {"synth.target_sd", "4"},
      {"ingest.step_ms", "1000"},
      {"split.train_fraction", "0.8"},
      {"split.mode", "random"},
      {"features.f_nonlin", "0.2"},
      {"features.set", "linear"},
      {"features.trees", "30"},
      {"model.kind", "gmdh"},
      {"model.mlffnn.hidden", "20"},
      {"model.sc.radius", "0.6"},
      {"model.fcm.exponent", "2.5"},
      {"model.ga.population", "25"},
      {"model.pso.inertia", "0.8"},
      {"model.gmdh.pressure", "0.5"},
      {"model.tuning.refit_consequents", "true"},
      {"limits.mu1", "1160"},
      {"sampling.Z", "100"},
      {"sampling.mode", "eq19"},
      {"sampling.sigma", "1.2"},
  };
  for (const auto &[key, value] : edits) {
    CAPTURE(key);
    RunConfig c = base;
    set_config_value(c, key, value);
    CHECK(config_hash(c) != h);
    set_config_value(c, key, value);
    CHECK(config_hash(c) != h);
  }
}

TEST_CASE("subcommands need their upstream artifacts") {
  RunConfig c = parse(kSmallRun);
  c.output_dir = scratch("upstream");
  std::ostringstream log;
  try {
    run_subcommand("train", c, log);
    FAIL("expected a missing-artifact error");
  } catch (const Error &e) {
    const std::string msg = e.what();
    CHECK(msg.find("aligned.csv") != std::string::npos);
    CHECK(msg.find("'ingest'") != std::string::npos);
  }
  try {
    run_subcommand("ingest", c, log);
    FAIL("expected a missing-artifact error");
  } catch (const Error &e) {
    CHECK(std::string(e.what()).find("'synth'") != std::string::npos);
  }
  CHECK_THROWS_AS(run_subcommand("deploy", c, log), Error);
  fs::remove_all(c.output_dir);
}

TEST_CASE("sample-plan reproduces the worked example from fixed numbers") {
  RunConfig c = load_config(fs::path(DRAWRES_SOURCE_DIR) / "configs" / "paper_example.conf");
  c.output_dir = scratch("example");
  std::ostringstream log;
  run_subcommand("sample-plan", c, log);
  std::istringstream csv(slurp(c.output_dir / "sampling_report.csv"));
  std::string header, row;
  std::getline(csv, header);
  std::getline(csv, row);
  const auto names = text::split(header), values = text::split(row);
  REQUIRE(names.size() == values.size());
  auto field = [&](const std::string &n) {
    for (std::size_t k = 0; k < names.size(); ++k)
      if (names[k] == n)
        return text::parse_double(values[k]).value();
    FAIL("missing column " << n);
    return 0.0;
  };
  CHECK(std::abs(field("P_old") - 0.047) <= 0.001);
  CHECK(std::abs(field("P_new") - 0.558) <= 0.001);
  CHECK(std::abs(field("delta_P") - 0.511) <= 0.002);
  CHECK(field("j2") == 6);
  CHECK(std::string(values.back()) == "paper-example");

  set_config_value(c, "sampling.mode", "eq19");
  run_subcommand("sample-plan", c, log);
  const std::string eq = slurp(c.output_dir / "sampling_report.txt");
  CHECK(eq.find("P_new = 0.554") != std::string::npos);
  CHECK(eq.find("mode = eq19") != std::string::npos);
  const std::string manifest = slurp(c.output_dir / "manifest.txt");
  CHECK(manifest.rfind("config_hash ", 0) == 0);
  CHECK(manifest.find("artifact sampling_report.csv ") != std::string::npos);
  fs::remove_all(c.output_dir);
}

TEST_CASE("a small pipeline writes every artifact") {
  RunConfig c = parse(kSmallRun);
  c.output_dir = scratch("pipeline");
  std::ostringstream log;
  run_subcommand("pipeline", c, log);
  for (const auto &name : artifact_names())
    CHECK_MESSAGE(fs::exists(c.output_dir / name), name);

  const std::string metrics = slurp(c.output_dir / "metrics.csv");
  CHECK(metrics.rfind("method,params,features,train_mse,train_rmse,train_r,test_mse,test_rmse,test_r\n", 0) == 0);
  std::istringstream rows(metrics);
  std::string line;
  std::getline(rows, line);
  int checked = 0;
  while (std::getline(rows, line)) {
    // params may be quoted and hold commas, so count the numeric columns from the end
    const auto f = text::split(line);
    REQUIRE(f.size() >= 9);
    for (std::size_t k : {f.size() - 6, f.size() - 3}) {
      const double mse = text::parse_double(f[k]).value();
      const double rmse = text::parse_double(f[k + 1]).value();
      CHECK(std::abs(rmse - std::sqrt(mse)) <= 1e-9);
      ++checked;
    }
  }
  CHECK(checked >= 2);

  const std::string manifest = slurp(c.output_dir / "manifest.txt");
  CHECK(manifest.find("seed 3\n") != std::string::npos);
  std::size_t listed = 0;
  for (std::size_t at = manifest.find("artifact "); at != std::string::npos;
       at = manifest.find("artifact ", at + 1))
    ++listed;
  CHECK(listed == artifact_names().size());
  CHECK(log.str().find("sample-plan") != std::string::npos);

  // a rerun of one stage leaves upstream files untouched
  const std::string scores = slurp(c.output_dir / "feature_scores.csv");
  run_subcommand("evaluate", c, log);
  CHECK(slurp(c.output_dir / "feature_scores.csv") == scores);
  fs::remove_all(c.output_dir);
}
