// Experiment runner: one experiment per invocation, deterministic seeding,
// manifest + CSV + summary artifacts.
//
//   isslab list
//   isslab run --experiment NAME [--config PATH] [--seed N] [--out DIR]
//              [--param key=value ...]
#include <CLI11.hpp>
#include <iostream>

#include "isslab/config.hpp"
#include "isslab/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"time-varying stability certification workbench"};
  app.require_subcommand(0, 1);

  auto* list_cmd = app.add_subcommand("list", "list registered experiments");

  std::string config_path, experiment, out_dir = "out";
  std::uint64_t seed = 1;
  bool seed_given = false;
  std::vector<std::string> params;
  auto* run_cmd = app.add_subcommand("run", "run one experiment");
  run_cmd->add_option("--config", config_path, "key=value config file");
  run_cmd->add_option("--experiment", experiment, "experiment name");
  run_cmd->add_option("--seed", seed, "PRNG seed")->each([&](const std::string&) {
    seed_given = true;
  });
  run_cmd->add_option("--out", out_dir, "output directory");
  run_cmd->add_option("--param", params, "extra key=value overrides")
      ->take_all();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (list_cmd->parsed()) {
    for (const auto& e : isslab::experiment_registry())
      std::cout << e.name << " - " << e.description << "\n";
    return 0;
  }

  if (!run_cmd->parsed()) {
    std::cout << app.help();
    return 2;
  }

  isslab::Config cfg;
  try {
    if (!config_path.empty()) cfg = isslab::Config::parse_file(config_path);
    if (!experiment.empty()) cfg.set("experiment", experiment);
    if (seed_given) cfg.set("seed", std::to_string(seed));
    for (const auto& p : params) {
      const auto eq = p.find('=');
      if (eq == std::string::npos) {
        std::cerr << "error: --param expects key=value, got '" << p << "'\n";
        return 2;
      }
      cfg.set(p.substr(0, eq), p.substr(eq + 1));
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }

  std::string log;
  const int code = isslab::run_experiment_config(cfg, out_dir, &log);
  std::cout << log;
  return code;
}
