#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "riemannopt/input_vector.hpp"
#include "riemannopt/model.hpp"
#include "riemannopt/riemann.hpp"

namespace riemannopt {

// |sum - model_delta| / |model_delta|. Throws DegenerateInputError when
// |model_delta| <= min_delta.
double completeness_error(const AttributionMap& attr, double min_delta = 1e-6);

struct InsertionCurve {
  std::vector<double> fractions;  // 0 ... 1, strictly increasing
  std::vector<double> scores;
  double auc = 0.0;  // trapezoid over fractions
};

// Pixels are ranked by attribution (summed over channels; ties to the lower
// pixel index) and copied from `input` into `baseline` in that order. Step s
// of `steps` has inserted floor(s * pixels / steps) pixels. Inputs without
// image shape are treated as one channel per feature.
InsertionCurve insertion_score(const Model& model, const InputVector& input,
                               const InputVector& baseline,
                               const AttributionMap& attr, std::size_t steps);

// curve.auc / input_score
double normalized_insertion_score(const InsertionCurve& curve,
                                  double input_score);

struct Summary {
  double mean = 0.0;
  double median = 0.0;  // lower middle for even counts
  std::size_t count = 0;
};

Summary aggregate(std::span<const double> values);

}  // namespace riemannopt
