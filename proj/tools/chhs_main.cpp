#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "chhs/driver.hpp"
#include "chhs/spectral.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Spectral Cahn-Hilliard-Hele-Shaw solver"};
  app.require_subcommand(1);

  std::string config;
  std::string output;
  auto* run = app.add_subcommand("run", "integrate a configuration");
  run->add_option("--config", config, "config file")->required();
  run->add_option("--output", output, "output directory (overrides output.directory)");

  std::string snapshot;
  auto* resume = app.add_subcommand("resume", "continue from a snapshot");
  resume->add_option("--snapshot", snapshot, "snapshot file")->required();
  resume->add_option("--config", config, "config file")->required();
  resume->add_option("--output", output, "output directory (overrides output.directory)");

  std::string dir;
  std::string window;
  auto* analyze = app.add_subcommand("analyze", "decay fits and snapshot diagnostics");
  analyze->add_option("--dir", dir, "run output directory")->required();
  analyze->add_option("--fit-window", window, "fit window t0:t1");

  auto* conditions = app.add_subcommand("conditions", "report the decay-theorem hypotheses");
  conditions->add_option("--config", config, "config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : chhs::kExitConfig;
  }

  int threads = 0;  // all cores
  if (const char* env = std::getenv("CHHS_THREADS")) {
    try {
      threads = std::stoi(env);
    } catch (const std::exception&) {
      std::cerr << "config error: CHHS_THREADS must be an integer\n";
      return chhs::kExitConfig;
    }
  }
  chhs::set_transform_threads(threads);

  const std::optional<std::string> out_dir =
      output.empty() ? std::nullopt : std::optional<std::string>(output);
  if (*run) return chhs::cmd_run(config, out_dir, std::cout, std::cerr);
  if (*resume) return chhs::cmd_resume(snapshot, config, out_dir, std::cout, std::cerr);
  if (*analyze) {
    std::optional<std::pair<double, double>> w;
    if (!window.empty()) {
      try {
        w = chhs::parse_fit_window(window);
      } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return chhs::kExitConfig;
      }
    }
    return chhs::cmd_analyze(dir, w, std::cout, std::cerr);
  }
  return chhs::cmd_conditions(config, std::cout, std::cerr);
}
