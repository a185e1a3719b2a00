#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "riemannopt/input_vector.hpp"
#include "riemannopt/random.hpp"
#include "riemannopt/schedule_optimizer.hpp"

namespace riemannopt::testing {

inline std::vector<double> random_vector(Rng& rng, std::size_t n,
                                         double lo = -1.0, double hi = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

inline InputVector random_image(Rng& rng, std::size_t h, std::size_t w,
                                double lo = 0.0, double hi = 1.0) {
  return InputVector(random_vector(rng, h * w, lo, hi), ImageShape{h, w, 1});
}

inline double max_abs_diff(const std::vector<double>& a,
                           const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a[i] - b[i]));
  }
  return m;
}

// Floor plus one to three Gaussian bumps, sampled on 32 probe intervals:
// the kind of shape profile estimation produces on smooth models.
inline DerivativeProfile smooth_random_profile(Rng& rng) {
  const int n = 32;
  std::vector<double> m(n, rng.uniform(0.0, 0.5));
  const int bumps = 1 + static_cast<int>(rng.uniform(0, 3));
  for (int b = 0; b < bumps; ++b) {
    const double c = rng.uniform(0, 1);
    const double w = rng.uniform(0.05, 0.3);
    const double a = rng.uniform(0.5, 5);
    for (int j = 0; j < n; ++j) {
      const double t = (j + 0.5) / n;
      m[static_cast<std::size_t>(j)] += a * std::exp(-(t - c) * (t - c) / (2 * w * w));
    }
  }
  return DerivativeProfile::from_probe_intervals(std::move(m));
}

}  // namespace riemannopt::testing
