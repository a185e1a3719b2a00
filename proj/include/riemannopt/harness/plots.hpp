#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "riemannopt/harness/config.hpp"
#include "riemannopt/harness/experiment.hpp"

namespace riemannopt::harness {

// Writes SVG plots from the files that calibrate and evaluate left in the
// output directory:
//   profile_<method>.svg   dataset profile with uniform and optimized ticks
//                          for the smallest sample count
//   examples_<method>.svg  per-example profiles over the dataset profile
//   error_vs_k.svg         mean completeness error against k
//   insertion_vs_k.svg     mean normalized insertion score against k
// With no results (missing or header-only results.csv) nothing is written
// and a warning is logged. Returns the files written.
std::vector<std::filesystem::path> emit_plots(const ExperimentConfig& config,
                                              const Logger& log = {});

}  // namespace riemannopt::harness
