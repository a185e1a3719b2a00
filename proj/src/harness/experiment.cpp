#include "riemannopt/harness/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <fmt/core.h>

#include "riemannopt/error.hpp"
#include "riemannopt/harness/dataset.hpp"
#include "riemannopt/harness/io.hpp"

namespace riemannopt::harness {

namespace fs = std::filesystem;

void CountingModel::do_gradient(std::span<const double> x,
                                std::span<double> out) const {
  gradients_.fetch_add(1, std::memory_order_relaxed);
  const auto g = inner_.gradient(x);
  std::copy(g.begin(), g.end(), out.begin());
}

namespace layout {
fs::path dataset_dir(const fs::path& out) { return out / "dataset"; }
fs::path profile(const fs::path& out, Method method) {
  return out / "profiles" / (to_string(method) + ".txt");
}
fs::path example_profiles(const fs::path& out, Method method) {
  return out / "profiles" / (to_string(method) + "_examples.csv");
}
fs::path schedule(const fs::path& out, Method method, std::size_t k) {
  return out / "schedules" / fmt::format("{}_k{}.txt", to_string(method), k);
}
fs::path calibration(const fs::path& out) { return out / "calibration.csv"; }
fs::path generalization(const fs::path& out) { return out / "generalization.csv"; }
fs::path results(const fs::path& out) { return out / "results.csv"; }
fs::path curves(const fs::path& out) { return out / "insertion_curves.csv"; }
fs::path timing(const fs::path& out) { return out / "timing.csv"; }
fs::path plots_dir(const fs::path& out) { return out / "plots"; }
}  // namespace layout

namespace {

void say(const Logger& log, const std::string& message) {
  if (log) log(message);
}

std::string count_text(long n) { return fmt::format("{}", n); }

// The dataset split into calibration (front) and evaluation (rest) images.
struct Split {
  std::vector<InputVector> calibration;
  std::vector<InputVector> evaluation;
};

Split split_dataset(const ExperimentConfig& config) {
  std::vector<InputVector> images = dataset_images(config.dataset);
  if (images.size() <= config.calibration_size) {
    throw ConfigError(fmt::format(
        "dataset has {} images; calibration_size {} leaves none to evaluate",
        images.size(), config.calibration_size));
  }
  if (!images.front().shape()) {
    throw ConfigError("dataset images carry no image shape");
  }
  Split split;
  const auto m = static_cast<std::ptrdiff_t>(config.calibration_size);
  split.calibration.assign(images.begin(), images.begin() + m);
  split.evaluation.assign(images.begin() + m, images.end());
  return split;
}

std::vector<double> uniform_times(std::size_t segments) {
  std::vector<double> times(segments + 1);
  for (std::size_t j = 0; j <= segments; ++j) {
    times[j] = static_cast<double>(j) / static_cast<double>(segments);
  }
  times.back() = 1.0;
  return times;
}

double max_abs_diff(const AlphaSchedule& a, const AlphaSchedule& b) {
  double worst = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    worst = std::max(worst, std::abs(a[j] - b[j]));
  }
  return worst;
}

MethodCalibration calibrate_method(const ExperimentConfig& config,
                                   const Model& model, Method method,
                                   const std::vector<InputVector>& images,
                                   const Logger& log) {
  MethodCalibration result;
  result.method = method;
  CountingModel probe_model(model);
  CountingModel path_model(model);
  const std::vector<double> probe_times =
      config.gig_steps > 0 ? uniform_times(config.gig_steps)
                           : uniform_times(config.probes - 1);
  for (std::size_t e = 0; e < images.size(); ++e) {
    const auto path = method_path(config, path_model, method, images[e], probe_times);
    try {
      result.example_magnitudes.push_back(
          derivative_magnitudes(probe_matrix(probe_model, *path, config.probes)));
    } catch (const NumericalError& err) {
      throw NumericalError(fmt::format("{} calibration example {}: {}",
                                       to_string(method), e, err.what()));
    }
  }
  result.gradient_evals = probe_model.gradient_calls();
  result.path_gradient_evals = path_model.gradient_calls();
  result.profile = average_profile(result.example_magnitudes);

  const std::size_t half = images.size() / 2;
  const std::span<const std::vector<double>> all(result.example_magnitudes);
  for (std::size_t k : config.sample_counts) {
    ScheduleResult s;
    s.k = k;
    s.optimized = optimize_schedule(result.profile, k, config.powell, config.bound);
    if (half >= 1) {
      const auto a = optimize_schedule(average_profile(all.subspan(0, half)), k,
                                       config.powell, config.bound);
      const auto b = optimize_schedule(average_profile(all.subspan(half, half)), k,
                                       config.powell, config.bound);
      s.half_split_max_diff = max_abs_diff(a.schedule, b.schedule);
    }
    say(log, fmt::format("{} k={}: bound {:.6g} (uniform {:.6g}), {} Powell cycles",
                         to_string(method), k, s.optimized.bound,
                         s.optimized.uniform_bound, s.optimized.iterations));
    result.schedules.push_back(std::move(s));
  }
  return result;
}

}  // namespace

std::unique_ptr<Model> build_model(const ExperimentConfig& config,
                                   std::size_t input_dim) {
  if (!config.weights_file.empty()) {
    if (config.model != ModelKind::kTinyMlp) {
      throw ConfigError("model.weights is only supported for tiny-mlp");
    }
    MlpParameters params = read_weights(config.weights_file);
    if (params.input_dim != input_dim) {
      throw ConfigError(fmt::format("weights file expects {} inputs, images have {}",
                                    params.input_dim, input_dim));
    }
    return std::make_unique<TinyMlp>(std::move(params));
  }
  BuiltinModelSpec spec;
  spec.kind = config.model;
  spec.input_dim = input_dim;
  spec.seed = config.model_seed;
  spec.width = config.bump_width;
  spec.mlp.hidden1 = config.hidden[0];
  spec.mlp.hidden2 = config.hidden[1];
  spec.mlp.weight_gain = config.model_gain;
  spec.mlp.bias_scale = config.model_bias_scale;
  spec.mlp.sigmoid_output = config.model_sigmoid;
  return make_model(spec);
}

BlurPathConfig blur_config(const ExperimentConfig& config, const ImageShape& shape) {
  BlurPathConfig blur = BlurPathConfig::defaults_for(shape);
  if (config.blur_alpha_max > 0.0) {
    blur.alpha_max = config.blur_alpha_max;
    blur.kernel_radius = BlurPathConfig::min_radius(blur.alpha_max);
  }
  if (config.blur_radius > 0) blur.kernel_radius = config.blur_radius;
  blur.velocity_step = config.blur_velocity_step;
  try {
    blur.validate();
  } catch (const DomainError& e) {
    throw ConfigError(fmt::format("blur settings: {}", e.what()));
  }
  return blur;
}

std::unique_ptr<Path> method_path(const ExperimentConfig& config,
                                  const Model& model, Method method,
                                  const InputVector& image,
                                  std::span<const double> anchor_times) {
  const InputVector black = image.with_values(std::vector<double>(image.size(), 0.0));
  switch (method) {
    case Method::kIg:
      return linear_path(black, image);
    case Method::kBlurIg:
      if (!image.shape()) throw InputShapeError("blurig needs image shape metadata");
      return blur_path(image, blur_config(config, *image.shape()));
    case Method::kGig:
      return guided_path(model, black, image, anchor_times, config.gig_fraction);
  }
  throw DomainError("unhandled method");
}

std::vector<double> anchor_times(const ExperimentConfig& config,
                                 const AlphaSchedule& schedule) {
  if (config.gig_steps > 0) return uniform_times(config.gig_steps);
  if (schedule.size() < 2) return uniform_times(2);
  std::vector<double> times(schedule.points().begin(), schedule.points().end());
  times.push_back(schedule.terminal());
  return times;
}

CalibrationResult run_calibration(const ExperimentConfig& config, const Logger& log) {
  config.validate();
  const fs::path out = config.output;
  const Split split = split_dataset(config);
  const auto model = build_model(config, split.calibration.front().size());
  say(log, fmt::format("calibrating on {} images, {} probes, {} model",
                       split.calibration.size(), config.probes, model->name()));

  CalibrationResult result;
  std::vector<CsvRow> cost_rows, split_rows;
  for (Method method : config.methods) {
    MethodCalibration mc =
        calibrate_method(config, *model, method, split.calibration, log);

    write_profile(layout::profile(out, method), mc.profile);
    std::vector<CsvRow> example_rows;
    for (std::size_t e = 0; e < mc.example_magnitudes.size(); ++e) {
      const auto p = DerivativeProfile::from_probe_intervals(mc.example_magnitudes[e]);
      for (std::size_t j = 0; j < p.knots().size(); ++j) {
        example_rows.push_back({fmt::format("{}", e), format_real(p.knots()[j]),
                                format_real(p.magnitudes()[j])});
      }
    }
    write_text(layout::example_profiles(out, method),
               format_csv({"example", "knot", "magnitude"}, example_rows));
    for (const auto& s : mc.schedules) {
      write_schedule(layout::schedule(out, method, s.k), s.optimized.schedule);
      if (s.half_split_max_diff >= 0.0) {
        split_rows.push_back({to_string(method), fmt::format("{}", s.k),
                              fmt::format("{}", mc.example_magnitudes.size() / 2),
                              format_real(s.half_split_max_diff)});
      }
    }
    cost_rows.push_back({to_string(method), fmt::format("{}", split.calibration.size()),
                         fmt::format("{}", config.probes), count_text(mc.gradient_evals),
                         count_text(mc.path_gradient_evals)});
    say(log, fmt::format("{}: {} integrand gradients, {} path gradients",
                         to_string(method), mc.gradient_evals, mc.path_gradient_evals));
    result.methods.push_back(std::move(mc));
  }
  write_text(layout::calibration(out),
             format_csv({"method", "examples", "probes", "gradient_evals",
                         "path_gradient_evals"},
                        cost_rows));
  write_text(layout::generalization(out),
             format_csv({"method", "k", "half_size", "max_abs_diff"}, split_rows));
  return result;
}

std::vector<ResultRow> run_evaluation(const ExperimentConfig& config, const Logger& log) {
  config.validate();
  const fs::path out = config.output;
  const Split split = split_dataset(config);
  const auto& images = split.evaluation;
  const auto model = build_model(config, images.front().size());

  // Schedules first, so a missing file fails before any work is done.
  std::vector<std::vector<AlphaSchedule>> calibrated;
  for (Method method : config.methods) {
    auto& per_k = calibrated.emplace_back();
    for (std::size_t k : config.sample_counts) {
      const fs::path file = layout::schedule(out, method, k);
      if (!fs::exists(file)) {
        throw ConfigError(fmt::format("missing schedule '{}'; run calibrate first",
                                      file.string()));
      }
      AlphaSchedule s = read_schedule(file);
      if (s.size() != k) {
        throw ConfigError(fmt::format("schedule '{}' has k={}, expected {}",
                                      file.string(), s.size(), k));
      }
      per_k.push_back(std::move(s));
    }
  }

  // Insertion baselines and input scores do not depend on the method.
  const BlurPathConfig blur = blur_config(config, *images.front().shape());
  std::vector<InputVector> insertion_baselines;
  std::vector<double> input_scores;
  for (const auto& image : images) {
    insertion_baselines.push_back(BlurPath(image, blur).point(0.0));
    input_scores.push_back(model->evaluate(image));
  }

  std::vector<ResultRow> rows;
  for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
    const Method method = config.methods[mi];
    // Images whose attribution target f(x) - f(x') is too small are skipped.
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < images.size(); ++i) {
      const double baseline_score =
          method == Method::kBlurIg
              ? model->evaluate(insertion_baselines[i])
              : model->evaluate(std::vector<double>(images[i].size(), 0.0));
      if (std::abs(input_scores[i] - baseline_score) > config.min_delta) {
        kept.push_back(i);
      }
    }
    if (kept.size() < images.size()) {
      say(log, fmt::format("{}: skipping {} of {} images with |f(x) - f(x')| <= {}",
                           to_string(method), images.size() - kept.size(),
                           images.size(), config.min_delta));
    }
    if (kept.empty()) {
      say(log, fmt::format("warning: no usable images for {}", to_string(method)));
      continue;
    }
    for (std::size_t ki = 0; ki < config.sample_counts.size(); ++ki) {
      const std::size_t k = config.sample_counts[ki];
      for (const bool optimized : {false, true}) {
        const AlphaSchedule schedule =
            optimized ? calibrated[mi][ki] : AlphaSchedule::uniform(k);
        const auto start = std::chrono::steady_clock::now();
        CountingModel attr_model(*model);
        CountingModel path_model(*model);
        const auto times = anchor_times(config, schedule);
        std::vector<double> errors, aucs, normalized;
        std::vector<double> curve_sum(config.insertion_steps + 1, 0.0);
        for (std::size_t i : kept) {
          const auto path = method_path(config, path_model, method, images[i], times);
          AttributionMap attr;
          try {
            attr = attribute(attr_model, *path, schedule);
          } catch (const NumericalError& err) {
            throw NumericalError(fmt::format("{} image {}: {}", to_string(method),
                                             split.calibration.size() + i, err.what()));
          }
          errors.push_back(completeness_error(attr, config.min_delta));
          const InsertionCurve curve = insertion_score(
              *model, images[i], insertion_baselines[i], attr, config.insertion_steps);
          aucs.push_back(curve.auc);
          for (std::size_t s = 0; s < curve.scores.size(); ++s) {
            curve_sum[s] += curve.scores[s];
          }
          if (std::abs(input_scores[i]) > 1e-12) {
            normalized.push_back(normalized_insertion_score(curve, input_scores[i]));
          }
        }
        ResultRow row;
        row.method = method;
        row.schedule_kind = optimized ? "riemannopt" : "uniform";
        row.k = k;
        row.error = aggregate(errors);
        row.insertion = aggregate(aucs);
        if (!normalized.empty()) row.normalized_insertion = aggregate(normalized);
        row.gradient_evals = attr_model.gradient_calls();
        row.path_gradient_evals = path_model.gradient_calls();
        row.seconds = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
        for (double& v : curve_sum) v /= static_cast<double>(kept.size());
        row.mean_curve = std::move(curve_sum);
        say(log, fmt::format("{} {} k={}: mean error {:.6g} over {} images",
                             to_string(method), row.schedule_kind, k, row.error.mean,
                             row.error.count));
        rows.push_back(std::move(row));
      }
    }
  }

  std::vector<CsvRow> result_rows, curve_rows, timing_rows;
  for (const auto& r : rows) {
    const std::string m = to_string(r.method);
    const std::string k = fmt::format("{}", r.k);
    result_rows.push_back({m, r.schedule_kind, k, fmt::format("{}", r.error.count),
                           format_real(r.error.mean), format_real(r.error.median),
                           format_real(r.insertion.mean), format_real(r.insertion.median),
                           format_real(r.normalized_insertion.mean),
                           format_real(r.normalized_insertion.median),
                           count_text(r.gradient_evals),
                           count_text(r.path_gradient_evals)});
    for (std::size_t s = 0; s < r.mean_curve.size(); ++s) {
      const double fraction =
          static_cast<double>(s) / static_cast<double>(config.insertion_steps);
      curve_rows.push_back(
          {m, r.schedule_kind, k, format_real(fraction), format_real(r.mean_curve[s])});
    }
    timing_rows.push_back({m, r.schedule_kind, k, fmt::format("{:.6f}", r.seconds)});
  }
  write_text(layout::results(out),
             format_csv({"method", "schedule", "k", "images", "mean_error",
                         "median_error", "mean_insertion", "median_insertion",
                         "mean_normalized_insertion", "median_normalized_insertion",
                         "gradient_evals", "path_gradient_evals"},
                        result_rows));
  write_text(layout::curves(out),
             format_csv({"method", "schedule", "k", "fraction", "mean_score"},
                        curve_rows));
  write_text(layout::timing(out),
             format_csv({"method", "schedule", "k", "seconds"}, timing_rows));
  return rows;
}

void run_generate(const ExperimentConfig& config, const Logger& log) {
  config.validate();
  const auto images = dataset_images(config.dataset);
  export_dataset(layout::dataset_dir(config.output), images);
  say(log, fmt::format("wrote {} images to {}", images.size(),
                       layout::dataset_dir(config.output).string()));
}

}  // namespace riemannopt::harness
