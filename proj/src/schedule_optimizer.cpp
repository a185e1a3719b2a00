#include "riemannopt/schedule_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "riemannopt/error.hpp"

namespace riemannopt {

// ------------------------------------------------------------------ profile

DerivativeProfile::DerivativeProfile(std::vector<double> knots,
                                     std::vector<double> magnitudes)
    : knots_(std::move(knots)), magnitudes_(std::move(magnitudes)) {
  if (knots_.empty() || knots_.size() != magnitudes_.size()) {
    throw InputShapeError("profile needs one magnitude per knot");
  }
  for (std::size_t j = 0; j < knots_.size(); ++j) {
    if (!(knots_[j] >= 0.0 && knots_[j] <= 1.0)) {
      throw DomainError("profile knots must lie in [0, 1]");
    }
    if (j > 0 && !(knots_[j - 1] < knots_[j])) {
      throw DomainError("profile knots must be strictly increasing");
    }
    if (!(magnitudes_[j] >= 0.0) || !std::isfinite(magnitudes_[j])) {
      throw DomainError("profile magnitudes must be finite and >= 0");
    }
  }
}

DerivativeProfile DerivativeProfile::from_probe_intervals(
    std::vector<double> magnitudes) {
  const std::size_t n = magnitudes.size();
  std::vector<double> knots(n);
  for (std::size_t j = 0; j < n; ++j) {
    knots[j] = (static_cast<double>(j) + 0.5) / static_cast<double>(n);
  }
  return DerivativeProfile(std::move(knots), std::move(magnitudes));
}

DerivativeProfile DerivativeProfile::constant(double value) {
  return DerivativeProfile({0.5}, {value});
}

double DerivativeProfile::at(double t) const {
  if (t <= knots_.front()) return magnitudes_.front();
  if (t >= knots_.back()) return magnitudes_.back();
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  const auto hi = static_cast<std::size_t>(std::distance(knots_.begin(), it));
  const std::size_t lo = hi - 1;
  const double u = (t - knots_[lo]) / (knots_[hi] - knots_[lo]);
  return magnitudes_[lo] + u * (magnitudes_[hi] - magnitudes_[lo]);
}

double DerivativeProfile::max() const {
  return *std::max_element(magnitudes_.begin(), magnitudes_.end());
}

// --------------------------------------------------------------- estimation

ProbeMatrix probe_matrix(const Model& model, const Path& path,
                         std::size_t probes) {
  if (probes < 2) throw DomainError("probe count must be >= 2");
  ProbeMatrix m;
  m.probe_points.resize(probes);
  m.samples.reserve(probes);
  for (std::size_t j = 0; j < probes; ++j) {
    const double t = j + 1 == probes ? 1.0
                                     : static_cast<double>(j) /
                                           static_cast<double>(probes - 1);
    m.probe_points[j] = t;
    m.samples.push_back(integrand(model, path, t));
    for (double v : m.samples.back()) {
      if (!std::isfinite(v)) {
        std::ostringstream msg;
        msg << "non-finite integrand at probe " << j << " (t=" << t << ")";
        throw NumericalError(msg.str());
      }
    }
  }
  return m;
}

std::vector<double> derivative_magnitudes(const ProbeMatrix& probes) {
  const std::size_t k = probes.samples.size();
  if (k < 2) throw DomainError("need at least two probes");
  const std::size_t d = probes.samples.front().size();
  std::vector<double> out(k - 1, 0.0);
  if (d == 0) return out;
  for (std::size_t j = 0; j + 1 < k; ++j) {
    const double dt = probes.probe_points[j + 1] - probes.probe_points[j];
    double acc = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      acc += std::abs((probes.samples[j + 1][i] - probes.samples[j][i]) / dt);
    }
    out[j] = acc / static_cast<double>(d);
  }
  return out;
}

DerivativeProfile average_profile(
    std::span<const std::vector<double>> per_example) {
  if (per_example.empty()) {
    throw DomainError("profile estimation needs at least one example");
  }
  std::vector<double> sum(per_example.front().size(), 0.0);
  for (const auto& row : per_example) {
    require_same_dimension(row.size(), sum.size(), "profile rows");
    for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += row[j];
  }
  const auto m = static_cast<double>(per_example.size());
  for (double& v : sum) v /= m;
  return DerivativeProfile::from_probe_intervals(std::move(sum));
}

DerivativeProfile estimate_profile(const Model& model,
                                   std::span<const Path* const> examples,
                                   std::size_t probes) {
  if (examples.empty()) {
    throw DomainError("profile estimation needs at least one example");
  }
  if (probes < 2) throw DomainError("probe count must be >= 2");
  std::vector<std::vector<double>> rows;
  rows.reserve(examples.size());
  for (std::size_t e = 0; e < examples.size(); ++e) {
    try {
      rows.push_back(
          derivative_magnitudes(probe_matrix(model, *examples[e], probes)));
    } catch (const NumericalError& err) {
      throw NumericalError("example " + std::to_string(e) + ": " + err.what());
    }
  }
  return average_profile(rows);
}

// -------------------------------------------------------------- error bound

BoundRule parse_bound_rule(const std::string& text) {
  if (text == "left-point") return BoundRule::kLeftPoint;
  if (text == "integral") return BoundRule::kIntegral;
  throw DomainError("unknown bound rule '" + text + "'");
}

std::string to_string(BoundRule rule) {
  return rule == BoundRule::kLeftPoint ? "left-point" : "integral";
}

double interval_bound(const DerivativeProfile& profile, double a, double b,
                      BoundRule rule) {
  const double w = b - a;
  if (rule == BoundRule::kLeftPoint) return 0.5 * profile.at(a) * w * w;
  // (b - s) |g'(s)| is quadratic between knots, so Simpson's rule on each
  // knot-free piece is exact.
  auto h = [&](double s) { return (b - s) * profile.at(s); };
  const auto knots = profile.knots();
  auto it = std::upper_bound(knots.begin(), knots.end(), a);
  double lo = a;
  double sum = 0.0;
  while (lo < b) {
    const double hi = (it != knots.end() && *it < b) ? *it++ : b;
    sum += (hi - lo) / 6.0 * (h(lo) + 4.0 * h(0.5 * (lo + hi)) + h(hi));
    lo = hi;
  }
  return sum;
}

double error_bound(const DerivativeProfile& profile,
                   const AlphaSchedule& schedule, BoundRule rule) {
  double sum = 0.0;
  for (std::size_t j = 0; j < schedule.size(); ++j) {
    const double a = schedule[j];
    sum += interval_bound(profile, a, a + schedule.width(j), rule);
  }
  return sum;
}

// ------------------------------------------------------------- optimization

namespace {

// Lower bound on each interval's share of [0, 1]; keeps consecutive points
// distinguishable in double precision whatever the parameters are.
constexpr double kMinShare = 1e-9;

}  // namespace

AlphaSchedule schedule_from_parameters(std::span<const double> params) {
  const std::size_t k = params.size();
  if (k == 0) throw DomainError("schedule needs at least one parameter");
  for (double p : params) {
    if (std::isnan(p)) throw NumericalError("NaN schedule parameter");
  }
  const double top = *std::max_element(params.begin(), params.end());
  std::vector<double> shares(k);
  double total = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    shares[j] = std::isinf(top) ? (params[j] == top ? 1.0 : 0.0)
                                : std::exp(params[j] - top);
    total += shares[j];
  }
  const double free_mass = 1.0 - kMinShare * static_cast<double>(k);
  std::vector<double> points(k);
  double cumulative = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    points[j] = cumulative;
    cumulative += kMinShare + free_mass * shares[j] / total;
  }
  return AlphaSchedule(std::move(points));
}

OptimizedSchedule optimize_schedule(const DerivativeProfile& profile,
                                    std::size_t k,
                                    const PowellOptions& options,
                                    BoundRule rule) {
  if (k == 0) throw DomainError("optimize_schedule: k must be >= 1");
  OptimizedSchedule out;
  out.schedule = AlphaSchedule::uniform(k);
  out.uniform_bound = error_bound(profile, out.schedule, rule);
  out.bound = out.uniform_bound;
  if (k == 1) return out;

  auto objective = [&profile, rule](std::span<const double> params) {
    return error_bound(profile, schedule_from_parameters(params), rule);
  };
  const PowellResult r =
      powell_minimize(objective, std::vector<double>(k, 0.0), options);
  out.converged = r.converged;
  out.iterations = r.iterations;
  AlphaSchedule candidate = schedule_from_parameters(r.argmin);
  const double bound = error_bound(profile, candidate, rule);
  if (bound < out.uniform_bound) {
    out.schedule = std::move(candidate);
    out.bound = bound;
  }
  return out;
}

AlphaSchedule grid_search_schedule(const DerivativeProfile& profile,
                                   std::size_t k, std::size_t grid,
                                   BoundRule rule) {
  if (k == 0) throw DomainError("grid search: k must be >= 1");
  if (grid == 0 || grid > 512) {
    throw DomainError("grid search: grid must be in [1, 512]");
  }
  if (k > grid) throw DomainError("grid search: k must not exceed grid");

  const double h = 1.0 / static_cast<double>(grid);
  auto at = [h, grid](std::size_t p) {
    return p == grid ? 1.0 : static_cast<double>(p) * h;
  };
  // cost[a][b - a - 1]: interval from grid index a to b.
  std::vector<std::vector<double>> table(grid);
  for (std::size_t a = 0; a < grid; ++a) {
    table[a].resize(grid - a);
    for (std::size_t b = a + 1; b <= grid; ++b) {
      table[a][b - a - 1] = interval_bound(profile, at(a), at(b), rule);
    }
  }
  auto cost = [&table](std::size_t a, std::size_t b) {
    return table[a][b - a - 1];
  };

  // best[j][p]: minimal cost of the intervals from point j (at grid index p)
  // to the terminal, with points j+1..k-1 still to place.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> best(k, std::vector<double>(grid + 1, kInf));
  std::vector<std::vector<std::size_t>> next(
      k, std::vector<std::size_t>(grid + 1, grid));
  for (std::size_t p = k - 1; p < grid; ++p) best[k - 1][p] = cost(p, grid);
  for (std::size_t j = k - 1; j-- > 0;) {
    const std::size_t last_b = grid - (k - 1 - j);
    for (std::size_t p = j; p < last_b; ++p) {
      double v = kInf;
      std::size_t arg = grid;
      for (std::size_t b = p + 1; b <= last_b; ++b) {
        const double c = cost(p, b) + best[j + 1][b];
        if (c < v) {
          v = c;
          arg = b;
        }
      }
      best[j][p] = v;
      next[j][p] = arg;
    }
  }

  std::vector<double> points(k);
  std::size_t p = 0;
  for (std::size_t j = 0; j < k; ++j) {
    points[j] = at(p);
    if (j + 1 < k) p = next[j][p];
  }
  return AlphaSchedule(std::move(points));
}

}  // namespace riemannopt
