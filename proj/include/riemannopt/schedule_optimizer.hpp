#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "riemannopt/model.hpp"
#include "riemannopt/paths.hpp"
#include "riemannopt/powell.hpp"
#include "riemannopt/riemann.hpp"

namespace riemannopt {

// Non-negative estimate of |g'(t)| on [0, 1]: linear interpolation between
// knots, constant beyond the first and last knot.
class DerivativeProfile {
 public:
  DerivativeProfile(std::vector<double> knots, std::vector<double> magnitudes);

  // Knots at the midpoints of `magnitudes.size()` equal probe intervals.
  static DerivativeProfile from_probe_intervals(std::vector<double> magnitudes);
  static DerivativeProfile constant(double value);

  double at(double t) const;
  double max() const;
  std::span<const double> knots() const { return knots_; }
  std::span<const double> magnitudes() const { return magnitudes_; }

 private:
  std::vector<double> knots_;
  std::vector<double> magnitudes_;
};

// Integrand sampled at `probe_points.size()` equispaced t on [0, 1],
// endpoints included. samples[j][i] is feature i at probe j.
struct ProbeMatrix {
  std::vector<double> probe_points;
  std::vector<std::vector<double>> samples;
};

ProbeMatrix probe_matrix(const Model& model, const Path& path,
                         std::size_t probes);

// Finite differences between consecutive probes, absolute value, averaged
// over features. Length probes - 1.
std::vector<double> derivative_magnitudes(const ProbeMatrix& probes);

// Average of per-example magnitude vectors (all the same length).
DerivativeProfile average_profile(
    std::span<const std::vector<double>> per_example);

// Dataset-averaged |g'| over the given example paths. Throws NumericalError
// naming the example and probe when the integrand is not finite.
DerivativeProfile estimate_profile(const Model& model,
                                   std::span<const Path* const> examples,
                                   std::size_t probes);

// How the profile enters the per-interval error term.
enum class BoundRule {
  // 1/2 |g'(a_j)| (a_{j+1} - a_j)^2: first-order Taylor term at the left
  // point.
  kLeftPoint,
  // int_{a_j}^{a_{j+1}} (a_{j+1} - s) |g'(s)| ds: the same expansion with the
  // exact integral remainder. Identical to kLeftPoint for a constant
  // profile, but it sees derivative mass anywhere inside the interval, so an
  // interval that starts in a flat region cannot hide a steep one.
  kIntegral,
};

BoundRule parse_bound_rule(const std::string& text);
std::string to_string(BoundRule rule);

// Error term of a single interval [a, b] under `rule`.
double interval_bound(const DerivativeProfile& profile, double a, double b,
                      BoundRule rule);

// Sum of interval_bound over the schedule's intervals. With the default
// rule this is 1/2 sum_j profile(a_j) (a_{j+1} - a_j)^2.
double error_bound(const DerivativeProfile& profile,
                   const AlphaSchedule& schedule,
                   BoundRule rule = BoundRule::kLeftPoint);

// Maps k unconstrained reals to a valid k-point schedule: softmax gives the
// k interval widths (each floored at a tiny positive share), and their
// cumulative sum gives the points.
AlphaSchedule schedule_from_parameters(std::span<const double> params);

struct OptimizedSchedule {
  AlphaSchedule schedule = AlphaSchedule::uniform(1);
  double bound = 0.0;
  double uniform_bound = 0.0;
  bool converged = true;
  int iterations = 0;
};

// Minimizes error_bound over k-point schedules with Powell's method, starting
// from the uniform schedule. The result never has a larger bound than the
// uniform schedule.
OptimizedSchedule optimize_schedule(const DerivativeProfile& profile,
                                    std::size_t k,
                                    const PowellOptions& options = {},
                                    BoundRule rule = BoundRule::kLeftPoint);

// Exact minimizer of error_bound over schedules whose points lie on
// {0, 1/grid, ..., (grid-1)/grid}, by dynamic programming. Among equal
// bounds the lexicographically smallest schedule wins.
AlphaSchedule grid_search_schedule(const DerivativeProfile& profile,
                                   std::size_t k, std::size_t grid,
                                   BoundRule rule = BoundRule::kLeftPoint);

}  // namespace riemannopt
