// minidx: runs the scenarios of a config file and writes reports.
#include "minidx/errors.hpp"
#include "minidx/scenario.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Morse index lower bounds from harmonic one-forms"};
  app.require_subcommand(1, 1);

  std::string config_path;
  minidx::RunOptions options;
  std::uint64_t seed = 0;

  auto add_flags = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "scenario config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", options.out_dir, "output directory")->capture_default_str();
    sub->add_option("--resolution-scale", options.resolution_scale, "multiplies every grid resolution")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "overrides every scenario seed");
    sub->add_option("--tol-scale", options.tol_scale, "multiplies every tolerance")
        ->check(CLI::PositiveNumber);
  };

  std::vector<std::pair<CLI::App*, std::optional<minidx::Task>>> subs;
  for (minidx::Task t : minidx::all_tasks()) {
    auto* sub = app.add_subcommand(minidx::to_string(t), "run only the " + minidx::to_string(t) + " task");
    add_flags(sub);
    subs.emplace_back(sub, t);
  }
  auto* all = app.add_subcommand("all", "run every task listed by each scenario");
  add_flags(all);
  subs.emplace_back(all, std::nullopt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : minidx::kExitConfigError;
  }

  for (const auto& [sub, task] : subs)
    if (sub->parsed()) {
      options.only = task;
      if (sub->count("--seed")) options.seed = seed;
    }

  try {
    minidx::Config config = minidx::load_config(config_path);
    return minidx::run_config(config, options, std::cout);
  } catch (const minidx::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return minidx::kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return minidx::kExitRuntimeError;
  }
}
