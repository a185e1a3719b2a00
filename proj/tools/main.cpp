// riemannopt: calibrate and evaluate attribution sample schedules on a
// synthetic dataset.
//
//   riemannopt <generate|calibrate|evaluate|plot|all> [--config FILE]
//              [--out DIR] [--seed N] [--verbose]
//
// Exit codes: 0 success, 1 configuration error, 2 numerical error,
// 3 I/O error.

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "riemannopt/error.hpp"
#include "riemannopt/harness/config.hpp"
#include "riemannopt/harness/experiment.hpp"
#include "riemannopt/harness/plots.hpp"

namespace {

enum ExitCode { kOk = 0, kConfig = 1, kNumerical = 2, kIo = 3 };

using namespace riemannopt;
using namespace riemannopt::harness;

int run(const std::string& command, const ExperimentConfig& config,
        const Logger& log) {
  if (command == "generate" || command == "all") run_generate(config, log);
  if (command == "calibrate" || command == "all") run_calibration(config, log);
  if (command == "evaluate" || command == "all") run_evaluation(config, log);
  if (command == "plot" || command == "all") {
    // Missing results are a warning, not a failure.
    const Logger warn = [&](std::string_view msg) {
      if (log || msg.rfind("warning", 0) == 0) fmt::print(stderr, "{}\n", msg);
    };
    emit_plots(config, warn);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimized Riemann-sum schedules for path attribution methods"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool verbose = false;
  app.add_option("--config", config_path, "Experiment config file (key = value)")
      ->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Output directory (overrides `output`)");
  app.add_option("--seed", seed, "Seed (overrides `seed`)");
  app.add_flag("--verbose,-v", verbose, "Log progress to stderr");

  for (const char* name : {"generate", "calibrate", "evaluate", "plot", "all"}) {
    app.add_subcommand(name);
  }
  app.get_subcommand("generate")->description("Write the dataset as PGM images");
  app.get_subcommand("calibrate")
      ->description("Estimate profiles and write one schedule per sample count");
  app.get_subcommand("evaluate")
      ->description("Compare uniform and calibrated schedules, write results.csv");
  app.get_subcommand("plot")->description("Write SVG plots from existing outputs");
  app.get_subcommand("all")->description("generate, calibrate, evaluate and plot");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  const Logger log = verbose ? Logger([](std::string_view msg) {
    fmt::print(stderr, "{}\n", msg);
  })
                             : Logger();
  try {
    ExperimentConfig config =
        config_path.empty() ? ExperimentConfig{} : load_config(config_path);
    if (!out_dir.empty()) config.output = out_dir;
    if (seed) apply_seed(config, *seed);
    config.validate();
    return run(command, config, log);
  } catch (const ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kConfig;
  } catch (const DomainError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kConfig;
  } catch (const InputShapeError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kConfig;
  } catch (const IoError& e) {
    fmt::print(stderr, "I/O error: {}\n", e.what());
    return kIo;
  } catch (const Error& e) {
    fmt::print(stderr, "numerical error: {}\n", e.what());
    return kNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    fmt::print(stderr, "I/O error: {}\n", e.what());
    return kIo;
  }
}
