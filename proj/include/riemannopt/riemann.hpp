#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "riemannopt/model.hpp"
#include "riemannopt/paths.hpp"

namespace riemannopt {

// Left-rule sample points 0 = a_0 < a_1 < ... < a_{k-1} < terminal = 1.
// The integrand is evaluated at every a_j; interval j is [a_j, a_{j+1})
// with a_k = terminal. Construction rejects anything else, including
// unsorted input, rather than repairing it.
class AlphaSchedule {
 public:
  explicit AlphaSchedule(std::vector<double> points);

  static AlphaSchedule uniform(std::size_t k);

  std::size_t size() const { return points_.size(); }
  std::span<const double> points() const { return points_; }
  double operator[](std::size_t j) const { return points_[j]; }
  double terminal() const { return 1.0; }
  // a_{j+1} - a_j
  double width(std::size_t j) const {
    return (j + 1 < points_.size() ? points_[j + 1] : terminal()) - points_[j];
  }

  bool operator==(const AlphaSchedule&) const = default;

 private:
  std::vector<double> points_;
};

// sum_j g(a_j) (a_{j+1} - a_j)
double left_riemann(std::span<const double> samples,
                    const AlphaSchedule& schedule);

// grad f(gamma(t)) (elementwise) d gamma / dt
std::vector<double> integrand(const Model& model, const Path& path, double t);

struct AttributionMap {
  std::vector<double> values;
  double sum = 0.0;
  double model_delta = 0.0;  // f(path.point(1)) - f(path.point(0))
  AlphaSchedule schedule_used = AlphaSchedule::uniform(1);
};

// Per-feature left Riemann sums of the path integrand. Throws
// NumericalError naming the sample t when an integrand value is not finite.
AttributionMap attribute(const Model& model, const Path& path,
                         const AlphaSchedule& schedule);

}  // namespace riemannopt
