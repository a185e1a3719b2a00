#include "riemannopt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "riemannopt/error.hpp"

namespace riemannopt {

double completeness_error(const AttributionMap& attr, double min_delta) {
  if (!(std::abs(attr.model_delta) > min_delta)) {
    throw DegenerateInputError(
        "completeness error undefined: |f(x) - f(x')| = " +
        std::to_string(std::abs(attr.model_delta)));
  }
  return std::abs(attr.sum - attr.model_delta) / std::abs(attr.model_delta);
}

InsertionCurve insertion_score(const Model& model, const InputVector& input,
                               const InputVector& baseline,
                               const AttributionMap& attr, std::size_t steps) {
  if (steps == 0) throw DomainError("insertion: steps must be >= 1");
  require_same_dimension(input.size(), baseline.size(), "insertion baseline");
  require_same_dimension(attr.values.size(), input.size(),
                         "insertion attribution");
  const ImageShape shape =
      input.shape().value_or(ImageShape{1, input.size(), 1});
  const std::size_t pixels = shape.pixels();
  const std::size_t channels = shape.channels;

  std::vector<double> saliency(pixels, 0.0);
  for (std::size_t p = 0; p < pixels; ++p) {
    for (std::size_t c = 0; c < channels; ++c) {
      saliency[p] += attr.values[p * channels + c];
    }
  }
  std::vector<std::size_t> order(pixels);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&saliency](std::size_t a, std::size_t b) {
                     return saliency[a] > saliency[b];
                   });

  InsertionCurve curve;
  curve.fractions.resize(steps + 1);
  curve.scores.resize(steps + 1);
  std::vector<double> canvas = baseline.vector();
  std::size_t inserted = 0;
  for (std::size_t s = 0; s <= steps; ++s) {
    const std::size_t target = s * pixels / steps;
    for (; inserted < target; ++inserted) {
      const std::size_t p = order[inserted];
      for (std::size_t c = 0; c < channels; ++c) {
        canvas[p * channels + c] = input[p * channels + c];
      }
    }
    curve.fractions[s] = static_cast<double>(s) / static_cast<double>(steps);
    curve.scores[s] = s == steps ? model.evaluate(input)
                                 : model.evaluate(canvas);
  }
  for (std::size_t s = 0; s < steps; ++s) {
    curve.auc += 0.5 * (curve.scores[s] + curve.scores[s + 1]) *
                 (curve.fractions[s + 1] - curve.fractions[s]);
  }
  return curve;
}

double normalized_insertion_score(const InsertionCurve& curve,
                                  double input_score) {
  if (!(std::abs(input_score) > 1e-12)) {
    throw DegenerateInputError(
        "normalized insertion score undefined for f(input) ~ 0");
  }
  return curve.auc / input_score;
}

Summary aggregate(std::span<const double> values) {
  if (values.empty()) throw DomainError("aggregate: no values");
  Summary s;
  s.count = values.size();
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) /
           static_cast<double>(values.size());
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  s.median = sorted[(sorted.size() - 1) / 2];
  return s;
}

}  // namespace riemannopt
