// solrad command-line entry point: one subcommand per pipeline stage.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "solrad/cli/pipeline.hpp"
#include "solrad/error.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Satellite-derived solar radiation pipeline"};
  app.set_version_flag("--version", std::string(solrad::cli::kToolVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> sets;
  long long seed = -1;
  std::string out;

  for (const auto& name : solrad::cli::command_names()) {
    auto* sub = app.add_subcommand(name, "run the " + name + " stage");
    sub->add_option("--config", config_path, "key = value configuration file")->required();
    sub->add_option("--set", sets, "override a config key (key=value), repeatable");
    sub->add_option("--seed", seed, "override the master seed");
    sub->add_option("--out", out, "override paths.output_dir");
  }

  CLI11_PARSE(app, argc, argv);
  const auto* chosen = app.get_subcommands().front();

  try {
    solrad::cli::Overrides overrides;
    for (const auto& s : sets) overrides.push_back(solrad::cli::parse_override(s));
    if (seed >= 0) overrides.emplace_back("seed", std::to_string(seed));
    if (!out.empty()) overrides.emplace_back("paths.output_dir", out);
    const auto cfg = solrad::cli::load_config(config_path, overrides);
    return solrad::cli::run_command(chosen->get_name(), cfg, std::cerr);
  } catch (const solrad::Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
}
