#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "drawres/app.hpp"
#include "drawres/parallel.hpp"

int main(int argc, char **argv) {
  CLI::App app{"Draw-resistance prediction and targeted sampling pipeline"};
  app.fallthrough();
  app.require_subcommand(1, 1);

  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
  unsigned threads = 1;
  app.add_option("--config", config_path, "run configuration file")->required()->check(
      CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (overrides output.dir)");
  app.add_option("--seed", seed, "master seed (overrides seed)");
  app.add_option("--threads", threads, "worker thread cap")->check(CLI::Range(1u, 1024u));
  app.add_option("--mode", mode, "targeted-sampling coverage mode (overrides sampling.mode)")
      ->check(CLI::IsMember({"eq19", "paper-example"}));

  app.add_subcommand("synth", "generate a synthetic production line log with ground truth");
  app.add_subcommand("ingest", "align the change log onto a uniform grid and detect shifts");
  app.add_subcommand("features", "score indicators and select direct and potential features");
  app.add_subcommand("train", "fit the configured predictor on the training rows");
  app.add_subcommand("evaluate", "test metrics in MSE / RMSE / R layout");
  app.add_subcommand("flag", "mark predicted draw resistance outside the spec limits");
  app.add_subcommand("sample-plan", "random versus targeted sampling detection probability");
  app.add_subcommand("pipeline", "every stage above in order");

  CLI11_PARSE(app, argc, argv);

  try {
    drawres::RunConfig config = drawres::load_config(config_path);
    if (out_dir)
      config.output_dir = *out_dir;
    if (seed)
      config.seed = *seed;
    if (mode)
      drawres::set_config_value(config, "sampling.mode", *mode);
    drawres::set_max_threads(threads);
    drawres::run_subcommand(app.get_subcommands().front()->get_name(), config, std::cout);
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
