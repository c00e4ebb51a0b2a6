#include <cstdio>
#include <exception>
#include <functional>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "stpa/geometry_io.hpp"
#include "workbench.hpp"

namespace {

using Command = std::function<std::vector<std::filesystem::path>(const workbench::json&)>;

struct Invocation {
  std::string config_path;
  std::vector<std::string> overrides;
  bool print_config = false;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse tiled planar array workbench: array design, patterns, JCAS link and sensing"};
  app.set_version_flag("--version", workbench::version());
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, std::pair<std::string, Command>>> commands = {
      {"tile", {"Maximum-entropy domino tiling of the element grid", workbench::cmd_tile}},
      {"sparsify", {"Select tiles into sunflower subarrays", workbench::cmd_sparsify}},
      {"optimize", {"Minimax subarray position optimization", workbench::cmd_optimize}},
      {"pattern", {"Expanded beam pattern and metrics", workbench::cmd_pattern}},
      {"simulate-comm", {"Spectral efficiency, scan sweeps and blockage", workbench::cmd_simulate_comm}},
      {"simulate-sensing", {"OFDM scan: range-velocity maps, angle image, detections", workbench::cmd_simulate_sensing}},
      {"run", {"All stages in order", workbench::cmd_run}},
  };

  std::map<std::string, Invocation> invocations;
  for (const auto& [name, entry] : commands) {
    auto* sub = app.add_subcommand(name, entry.first);
    auto& inv = invocations[name];
    sub->add_option("-c,--config", inv.config_path, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("-s,--set", inv.overrides, "Override a key, e.g. --set optimize.max_iterations=10")
        ->allow_extra_args(false);
    sub->add_flag("--print-config", inv.print_config, "Print the resolved configuration and exit");
  }

  CLI11_PARSE(app, argc, argv);

  for (const auto& [name, entry] : commands) {
    if (!app.got_subcommand(name)) continue;
    const auto& inv = invocations.at(name);
    try {
      std::optional<workbench::json> user;
      if (!inv.config_path.empty()) user = stpa::read_json_file(inv.config_path);
      const auto config = workbench::resolve_config(user, inv.overrides);
      if (inv.print_config) {
        std::cout << config.dump(2) << '\n';
        return 0;
      }
      const auto info = workbench::RunInfo::from(config);
      std::cerr << name << ": config " << info.config_hash << ", seed " << info.seed << ", version "
                << info.version << '\n';
      for (const auto& path : entry.second(config)) std::cout << path.string() << '\n';
    } catch (const std::exception& e) {
      std::cerr << name << ": error: " << e.what() << '\n';
      return 1;
    }
  }
  return 0;
}
