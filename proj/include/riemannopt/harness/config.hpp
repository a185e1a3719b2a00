#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "riemannopt/model.hpp"
#include "riemannopt/powell.hpp"
#include "riemannopt/schedule_optimizer.hpp"

namespace riemannopt::harness {

enum class Method { kIg, kBlurIg, kGig };

Method parse_method(const std::string& text);
std::string to_string(Method method);

enum class Generator { kGaussianBlob, kBars, kChecker };

Generator parse_generator(const std::string& text);
std::string to_string(Generator generator);

struct DatasetSpec {
  Generator generator = Generator::kGaussianBlob;
  std::size_t count = 96;
  std::size_t height = 16;
  std::size_t width = 16;
  double noise = 0.02;
  std::uint64_t seed = 1;
  // When set, images are read from the PGM files in this directory (sorted
  // by name) instead of being generated.
  std::string dir;
};

struct ExperimentConfig {
  ModelKind model = ModelKind::kTinyMlp;
  std::vector<std::size_t> hidden = {16, 8};
  std::uint64_t model_seed = 7;
  double model_gain = 3.0;
  double model_bias_scale = 0.5;
  bool model_sigmoid = true;
  double bump_width = 2.0;
  std::string weights_file;

  std::vector<Method> methods = {Method::kIg, Method::kBlurIg, Method::kGig};
  std::vector<std::size_t> sample_counts = {16, 32, 64};
  // The first calibration_size images calibrate; the rest are evaluated.
  std::size_t calibration_size = 32;
  std::size_t probes = 64;
  DatasetSpec dataset;

  std::size_t insertion_steps = 16;
  double blur_alpha_max = 0.0;  // 0 picks BlurPathConfig::defaults_for
  int blur_radius = 0;          // 0 picks the three-sigma radius
  double blur_velocity_step = 1e-3;
  double gig_fraction = 0.1;
  // Guided-path segments, shared by calibration and every schedule so that
  // the profile describes the path being integrated. 0 instead places one
  // anchor at every sample point of the schedule in use.
  std::size_t gig_steps = 64;

  double min_delta = 1e-6;
  BoundRule bound = BoundRule::kIntegral;
  PowellOptions powell;

  std::string output = "out";
  std::uint64_t seed = 1;
  // dataset.seed was given explicitly and does not follow `seed`.
  bool dataset_seed_pinned = false;

  // Throws ConfigError on any inconsistent field.
  void validate() const;
};

// One `key = value` per line; `#` starts a comment. Unknown or repeated keys
// are errors. Keys that are absent keep their defaults, except that
// dataset.seed follows `seed` unless given explicitly.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

// Replaces `seed`, and dataset.seed unless it is pinned.
void apply_seed(ExperimentConfig& config, std::uint64_t seed);

}  // namespace riemannopt::harness
