#include "riemannopt/riemann.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "riemannopt/error.hpp"

namespace riemannopt {

AlphaSchedule::AlphaSchedule(std::vector<double> points)
    : points_(std::move(points)) {
  if (points_.empty()) {
    throw DomainError("schedule needs at least one point");
  }
  if (points_.front() != 0.0) {
    throw DomainError("schedule must start at 0");
  }
  for (std::size_t j = 0; j < points_.size(); ++j) {
    const double next = j + 1 < points_.size() ? points_[j + 1] : terminal();
    if (!std::isfinite(points_[j]) || !(points_[j] < next)) {
      std::ostringstream msg;
      msg << "schedule must be strictly increasing below 1 (point " << j
          << " = " << points_[j] << ", next = " << next << ")";
      throw DomainError(msg.str());
    }
  }
}

AlphaSchedule AlphaSchedule::uniform(std::size_t k) {
  if (k == 0) throw DomainError("schedule needs at least one point");
  std::vector<double> p(k);
  for (std::size_t j = 0; j < k; ++j) {
    p[j] = static_cast<double>(j) / static_cast<double>(k);
  }
  return AlphaSchedule(std::move(p));
}

double left_riemann(std::span<const double> samples,
                    const AlphaSchedule& schedule) {
  require_same_dimension(samples.size(), schedule.size(), "left_riemann");
  double sum = 0.0;
  for (std::size_t j = 0; j < samples.size(); ++j) {
    sum += samples[j] * schedule.width(j);
  }
  return sum;
}

std::vector<double> integrand(const Model& model, const Path& path,
                              double t) {
  require_same_dimension(path.dimension(), model.input_dim(), "integrand");
  std::vector<double> g = model.gradient(path.point(t));
  const std::vector<double> v = path.velocity(t);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] *= v[i];
  return g;
}

AttributionMap attribute(const Model& model, const Path& path,
                         const AlphaSchedule& schedule) {
  require_same_dimension(path.dimension(), model.input_dim(), "attribute");
  AttributionMap map;
  map.values.assign(path.dimension(), 0.0);
  for (std::size_t j = 0; j < schedule.size(); ++j) {
    const double t = schedule[j];
    const std::vector<double> sample = integrand(model, path, t);
    const double w = schedule.width(j);
    for (std::size_t i = 0; i < sample.size(); ++i) {
      if (!std::isfinite(sample[i])) {
        std::ostringstream msg;
        msg << "non-finite integrand at t=" << t << " (feature " << i << ")";
        throw NumericalError(msg.str());
      }
      map.values[i] += sample[i] * w;
    }
  }
  for (double v : map.values) map.sum += v;
  map.model_delta = model.evaluate(path.point(1.0)) -
                    model.evaluate(path.point(0.0));
  map.schedule_used = schedule;
  return map;
}

}  // namespace riemannopt
