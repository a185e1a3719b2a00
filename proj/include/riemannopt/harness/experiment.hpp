#pragma once

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "riemannopt/harness/config.hpp"
#include "riemannopt/metrics.hpp"
#include "riemannopt/model.hpp"
#include "riemannopt/paths.hpp"
#include "riemannopt/riemann.hpp"
#include "riemannopt/schedule_optimizer.hpp"

namespace riemannopt::harness {

using Logger = std::function<void(std::string_view)>;

// Forwards to another model and counts gradient calls. Counting is atomic,
// so the wrapper stays safe to share between threads.
class CountingModel final : public Model {
 public:
  explicit CountingModel(const Model& inner) : inner_(inner) {}
  std::size_t input_dim() const override { return inner_.input_dim(); }
  std::string name() const override { return inner_.name(); }
  long gradient_calls() const { return gradients_.load(); }

 protected:
  double do_evaluate(std::span<const double> x) const override {
    return inner_.evaluate(x);
  }
  void do_gradient(std::span<const double> x,
                   std::span<double> out) const override;

 private:
  const Model& inner_;
  mutable std::atomic<long> gradients_{0};
};

// Output layout under the configured output directory.
namespace layout {
std::filesystem::path dataset_dir(const std::filesystem::path& out);
std::filesystem::path profile(const std::filesystem::path& out, Method method);
std::filesystem::path example_profiles(const std::filesystem::path& out,
                                       Method method);
std::filesystem::path schedule(const std::filesystem::path& out, Method method,
                               std::size_t k);
std::filesystem::path calibration(const std::filesystem::path& out);
std::filesystem::path generalization(const std::filesystem::path& out);
std::filesystem::path results(const std::filesystem::path& out);
std::filesystem::path curves(const std::filesystem::path& out);
std::filesystem::path timing(const std::filesystem::path& out);
std::filesystem::path plots_dir(const std::filesystem::path& out);
}  // namespace layout

// The configured model for inputs of `input_dim` features. A weights file,
// when given, replaces the seeded tiny-mlp initialization.
std::unique_ptr<Model> build_model(const ExperimentConfig& config,
                                   std::size_t input_dim);

BlurPathConfig blur_config(const ExperimentConfig& config,
                           const ImageShape& shape);

// Path of `method` for one image. IG and GIG start from the black image,
// BlurIG from the maximally blurred one. `anchor_times` (0 = t_0 < ... <
// t_n = 1) are the guided-path segment ends and are ignored by the other
// methods.
std::unique_ptr<Path> method_path(const ExperimentConfig& config,
                                  const Model& model, Method method,
                                  const InputVector& image,
                                  std::span<const double> anchor_times);

// Guided-path anchor times for a schedule: its points followed by 1, or
// gig.steps equal segments when that is set.
std::vector<double> anchor_times(const ExperimentConfig& config,
                                 const AlphaSchedule& schedule);

struct ScheduleResult {
  std::size_t k = 0;
  OptimizedSchedule optimized;
  // max_j |a_j - b_j| between schedules from two disjoint calibration
  // halves; negative when there are fewer than two calibration images.
  double half_split_max_diff = -1.0;
};

struct MethodCalibration {
  Method method = Method::kIg;
  DerivativeProfile profile = DerivativeProfile::constant(0.0);
  std::vector<std::vector<double>> example_magnitudes;
  std::vector<ScheduleResult> schedules;
  long gradient_evals = 0;       // integrand probes
  long path_gradient_evals = 0;  // guided-path construction
};

struct CalibrationResult {
  std::vector<MethodCalibration> methods;
};

// Estimates the profile on the calibration images, optimizes one schedule
// per sample count and writes profiles, schedules, calibration.csv and
// generalization.csv.
CalibrationResult run_calibration(const ExperimentConfig& config,
                                  const Logger& log = {});

struct ResultRow {
  Method method = Method::kIg;
  std::string schedule_kind;  // "uniform" or "riemannopt"
  std::size_t k = 0;
  Summary error;
  Summary insertion;
  Summary normalized_insertion;
  long gradient_evals = 0;
  long path_gradient_evals = 0;
  double seconds = 0.0;
  std::vector<double> mean_curve;  // mean insertion score per step
};

// Attributes every evaluation image with uniform and calibrated schedules
// and writes results.csv, insertion_curves.csv and timing.csv. Throws
// ConfigError if a calibrated schedule file is missing.
std::vector<ResultRow> run_evaluation(const ExperimentConfig& config,
                                      const Logger& log = {});

// generate: writes the dataset images as PGM files.
void run_generate(const ExperimentConfig& config, const Logger& log = {});

}  // namespace riemannopt::harness
