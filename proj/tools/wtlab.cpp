// wtlab command-line driver: one subcommand per experiment kind; all
// numerics live in the library.
#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "wtlab/config.hpp"
#include "wtlab/experiments.hpp"
#include "wtlab/manifest.hpp"

namespace {

struct CliArgs {
  std::string config_path;
  std::string out_dir = "wtlab_out";
  std::optional<uint64_t> seed;
  std::optional<int> threads;
};

void add_common(CLI::App* cmd, CliArgs& args) {
  cmd->add_option("--config", args.config_path, "experiment config file")->required();
  cmd->add_option("--out", args.out_dir, "output directory");
  uint64_t seed = 0;
  cmd->add_option("--seed", seed, "override the config seed")
      ->each([&args](const std::string& v) { args.seed = std::stoull(v); });
  int threads = 0;
  cmd->add_option("--threads", threads, "worker threads for realization-parallel runs")
      ->each([&args](const std::string& v) { args.threads = std::stoi(v); });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wtlab: kinetic, amplitude-PDF and ensemble experiments for 4-wave turbulence"};
  app.set_version_flag("--version", std::string(wtlab::kVersion));
  app.require_subcommand(1);

  const std::vector<std::string> kinds = {"rates",    "kinetic",        "moments",
                                          "pdf-steady", "pdf-evolve",   "ensemble",
                                          "cap-experiment", "scaling",  "compare"};
  CliArgs args;
  std::string selected;
  for (const std::string& kind : kinds) {
    CLI::App* cmd = app.add_subcommand(kind, "run a '" + kind + "' experiment");
    add_common(cmd, args);
    cmd->callback([&selected, kind]() { selected = kind; });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    const wtlab::ExperimentConfig config = wtlab::ExperimentConfig::load(args.config_path);
    if (wtlab::to_string(config.kind()) != selected) {
      std::cerr << "error: config declares experiment '" << wtlab::to_string(config.kind())
                << "' but subcommand is '" << selected << "'\n";
      return 1;
    }
    wtlab::RunOverrides overrides;
    overrides.out_dir = args.out_dir;
    overrides.seed = args.seed;
    overrides.threads = args.threads;
    if (!overrides.threads) {
      if (const char* env = std::getenv("WTLAB_THREADS")) overrides.threads = std::atoi(env);
    }
    const int status = wtlab::run_experiment(config, overrides);
    if (status == 2) std::cerr << "one or more run checks failed; see manifest.json\n";
    return status;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
