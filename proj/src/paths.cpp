#include "riemannopt/paths.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "riemannopt/error.hpp"

namespace riemannopt {

namespace {

void require_unit_interval(double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw DomainError("path parameter t=" + std::to_string(t) +
                      " outside [0, 1]");
  }
}

}  // namespace

Path::Path(InputVector baseline, InputVector input)
    : baseline_(std::move(baseline)), input_(std::move(input)) {
  require_same_dimension(baseline_.size(), input_.size(), "path endpoints");
}

InputVector Path::point(double t) const {
  require_unit_interval(t);
  if (t == 0.0) return baseline_;
  if (t == 1.0) return input_;
  return input_.with_values(interior_point(t));
}

std::vector<double> Path::velocity(double t) const {
  require_unit_interval(t);
  return velocity_at(t);
}

// ------------------------------------------------------------------ linear

LinearPath::LinearPath(InputVector baseline, InputVector input)
    : Path(std::move(baseline), std::move(input)) {
  delta_.resize(dimension());
  for (std::size_t i = 0; i < delta_.size(); ++i) {
    delta_[i] = this->input()[i] - this->baseline()[i];
  }
}

std::vector<double> LinearPath::interior_point(double t) const {
  std::vector<double> out(dimension());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = baseline()[i] + t * delta_[i];
  }
  return out;
}

std::vector<double> LinearPath::velocity_at(double) const { return delta_; }

std::unique_ptr<Path> linear_path(const InputVector& baseline,
                                  const InputVector& input) {
  return std::make_unique<LinearPath>(baseline, input);
}

// -------------------------------------------------------------------- blur

std::vector<double> gaussian_kernel_1d(double alpha, int radius) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw DomainError("gaussian kernel: alpha must be > 0");
  }
  if (radius < 1) throw DomainError("gaussian kernel: radius must be >= 1");
  std::vector<double> w(static_cast<std::size_t>(2 * radius + 1));
  for (int n = -radius; n <= radius; ++n) {
    w[static_cast<std::size_t>(n + radius)] =
        std::exp(-static_cast<double>(n * n) / alpha);
  }
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& v : w) v /= total;
  return w;
}

Kernel2D gaussian_kernel(double alpha, int radius) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw DomainError("gaussian kernel: alpha must be > 0");
  }
  if (radius < 1) throw DomainError("gaussian kernel: radius must be >= 1");
  Kernel2D k;
  k.radius = radius;
  const int side = k.side();
  k.weights.resize(static_cast<std::size_t>(side * side));
  double total = 0.0;
  for (int y = -radius; y <= radius; ++y) {
    for (int x = -radius; x <= radius; ++x) {
      const double w = std::exp(-static_cast<double>(x * x + y * y) / alpha);
      k.weights[static_cast<std::size_t>((y + radius) * side + (x + radius))] =
          w;
      total += w;
    }
  }
  for (double& w : k.weights) w /= total;
  return k;
}

std::vector<double> gaussian_blur(std::span<const double> image,
                                  const ImageShape& shape, double alpha,
                                  int radius) {
  require_same_dimension(image.size(), shape.size(), "gaussian_blur");
  if (alpha == 0.0) return {image.begin(), image.end()};
  const std::vector<double> k = gaussian_kernel_1d(alpha, radius);
  const auto h = static_cast<long>(shape.height);
  const auto w = static_cast<long>(shape.width);
  const auto c = static_cast<long>(shape.channels);
  // Half-sample mirror: ... 1 0 | 0 1 2 ... n-1 | n-1 n-2 ... repeated, so
  // kernels wider than the image keep folding back inside it.
  auto mirror = [](long v, long n) {
    const long period = 2 * n;
    long r = v % period;
    if (r < 0) r += period;
    return r < n ? r : period - 1 - r;
  };

  // The truncated kernel is an outer product and the padding folds each axis
  // independently, so two 1D passes equal the full 2D convolution.
  std::vector<double> rows(image.size(), 0.0);
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      for (long ch = 0; ch < c; ++ch) {
        double acc = 0.0;
        for (long n = -radius; n <= radius; ++n) {
          acc += k[static_cast<std::size_t>(n + radius)] *
                 image[static_cast<std::size_t>((y * w + mirror(x + n, w)) * c +
                                                ch)];
        }
        rows[static_cast<std::size_t>((y * w + x) * c + ch)] = acc;
      }
    }
  }
  std::vector<double> out(image.size(), 0.0);
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      for (long ch = 0; ch < c; ++ch) {
        double acc = 0.0;
        for (long m = -radius; m <= radius; ++m) {
          acc += k[static_cast<std::size_t>(m + radius)] *
                 rows[static_cast<std::size_t>((mirror(y + m, h) * w + x) * c +
                                               ch)];
        }
        out[static_cast<std::size_t>((y * w + x) * c + ch)] = acc;
      }
    }
  }
  return out;
}

int BlurPathConfig::min_radius(double alpha_max) {
  const int r =
      static_cast<int>(std::ceil(3.0 * std::sqrt(alpha_max / 2.0) - 1e-12));
  return std::max(r, 1);
}

BlurPathConfig BlurPathConfig::defaults_for(const ImageShape& shape) {
  BlurPathConfig config;
  const double side =
      static_cast<double>(std::max(shape.height, shape.width));
  config.alpha_max = 0.5 * side * side;
  config.kernel_radius = min_radius(config.alpha_max);
  return config;
}

void BlurPathConfig::validate() const {
  if (!(alpha_max > 0.0) || !std::isfinite(alpha_max)) {
    throw DomainError("blur path: alpha_max must be > 0");
  }
  if (kernel_radius < 1) {
    throw DomainError("blur path: kernel_radius must be > 0");
  }
  if (!(velocity_step > 0.0) || velocity_step >= 0.5) {
    throw DomainError("blur path: velocity_step must be in (0, 0.5)");
  }
  if (kernel_radius < min_radius(alpha_max)) {
    throw DomainError("blur path: kernel_radius " +
                      std::to_string(kernel_radius) +
                      " truncates the kernel below three sigma (need >= " +
                      std::to_string(min_radius(alpha_max)) + ")");
  }
}

namespace {

InputVector blurred_baseline(const InputVector& input,
                             const BlurPathConfig& config) {
  if (!input.shape()) {
    throw InputShapeError("blur path requires image shape metadata");
  }
  config.validate();
  return input.with_values(gaussian_blur(input.values(), *input.shape(),
                                         config.alpha_max,
                                         config.kernel_radius));
}

}  // namespace

BlurPath::BlurPath(const InputVector& input, BlurPathConfig config)
    : Path(blurred_baseline(input, config), input),
      config_(config),
      shape_(*input.shape()) {}

std::vector<double> BlurPath::blurred(double t) const {
  if (t >= 1.0) return input().vector();
  return gaussian_blur(input().values(), shape_, alpha_at(t),
                       config_.kernel_radius);
}

std::vector<double> BlurPath::interior_point(double t) const {
  return blurred(t);
}

std::vector<double> BlurPath::velocity_at(double t) const {
  const double h = config_.velocity_step;
  double lo = t - h;
  double hi = t + h;
  if (lo < 0.0) {
    lo = t;
  } else if (hi > 1.0) {
    hi = t;
  }
  const std::vector<double> a = blurred(lo);
  const std::vector<double> b = blurred(hi);
  const double span = hi - lo;
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = (b[i] - a[i]) / span;
  return v;
}

std::unique_ptr<Path> blur_path(const InputVector& input,
                                const BlurPathConfig& config) {
  return std::make_unique<BlurPath>(input, config);
}

// ---------------------------------------------------------------- anchored

AnchoredPath::AnchoredPath(std::vector<double> anchor_times,
                           std::vector<std::vector<double>> anchors,
                           const InputVector& baseline,
                           const InputVector& input)
    : Path(baseline, input),
      times_(std::move(anchor_times)),
      anchors_(std::move(anchors)) {
  if (times_.size() < 2 || times_.size() != anchors_.size()) {
    throw InputShapeError("anchored path needs >= 2 anchors with one time each");
  }
  if (times_.front() != 0.0 || times_.back() != 1.0) {
    throw DomainError("anchored path times must start at 0 and end at 1");
  }
  for (std::size_t i = 0; i + 1 < times_.size(); ++i) {
    if (!(times_[i] < times_[i + 1])) {
      throw DomainError("anchored path times must be strictly increasing");
    }
  }
  for (const auto& a : anchors_) {
    require_same_dimension(a.size(), dimension(), "anchored path anchor");
  }
}

std::size_t AnchoredPath::segment(double t) const {
  // Segment s covers [t_s, t_{s+1}); t = 1 belongs to the last segment.
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  auto s = static_cast<std::size_t>(std::distance(times_.begin(), it));
  s = s == 0 ? 0 : s - 1;
  return std::min(s, times_.size() - 2);
}

std::vector<double> AnchoredPath::interior_point(double t) const {
  const std::size_t s = segment(t);
  const double u = (t - times_[s]) / (times_[s + 1] - times_[s]);
  const auto& a = anchors_[s];
  const auto& b = anchors_[s + 1];
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + u * (b[i] - a[i]);
  return out;
}

std::vector<double> AnchoredPath::velocity_at(double t) const {
  const std::size_t s = segment(t);
  const double dt = times_[s + 1] - times_[s];
  const auto& a = anchors_[s];
  const auto& b = anchors_[s + 1];
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = (b[i] - a[i]) / dt;
  return v;
}

std::unique_ptr<AnchoredPath> guided_path(const Model& model,
                                          const InputVector& baseline,
                                          const InputVector& input, int steps,
                                          double fraction) {
  if (steps < 2) throw DomainError("guided path: steps must be >= 2");
  std::vector<double> times(static_cast<std::size_t>(steps) + 1);
  for (int s = 0; s <= steps; ++s) {
    times[static_cast<std::size_t>(s)] =
        static_cast<double>(s) / static_cast<double>(steps);
  }
  return guided_path(model, baseline, input, times, fraction);
}

std::unique_ptr<AnchoredPath> guided_path(const Model& model,
                                          const InputVector& baseline,
                                          const InputVector& input,
                                          std::span<const double> anchor_times,
                                          double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw DomainError("guided path: fraction must lie in (0, 1]");
  }
  require_same_dimension(baseline.size(), input.size(), "guided path");
  require_same_dimension(input.size(), model.input_dim(), "guided path model");
  if (anchor_times.size() < 2 || anchor_times.front() != 0.0 ||
      anchor_times.back() != 1.0) {
    throw DomainError("guided path: anchor times must run from 0 to 1");
  }

  const std::size_t d = input.size();
  const std::size_t segments = anchor_times.size() - 1;
  std::vector<double> current = baseline.vector();
  double total = 0.0;
  for (std::size_t i = 0; i < d; ++i) total += std::abs(input[i] - baseline[i]);

  std::vector<std::size_t> remaining;
  for (std::size_t i = 0; i < d; ++i) {
    if (current[i] != input[i]) remaining.push_back(i);
  }

  std::vector<std::vector<double>> anchors;
  anchors.reserve(segments + 1);
  anchors.push_back(current);
  for (std::size_t s = 0; s < segments; ++s) {
    if (s + 1 == segments) {
      anchors.push_back(input.vector());
      break;
    }
    double budget = total * (anchor_times[s + 1] - anchor_times[s]);
    if (!remaining.empty() && budget > 0.0) {
      const std::vector<double> grad = model.gradient(current);
      // Lowest |gradient| first; ties go to the smaller feature index.
      std::stable_sort(remaining.begin(), remaining.end(),
                       [&grad](std::size_t a, std::size_t b) {
                         return std::abs(grad[a]) < std::abs(grad[b]);
                       });
      std::size_t head = 0;
      while (budget > 0.0 && head < remaining.size()) {
        const std::size_t left = remaining.size() - head;
        const auto take = std::clamp<std::size_t>(
            static_cast<std::size_t>(
                std::ceil(fraction * static_cast<double>(left))),
            1, left);
        double distance = 0.0;
        for (std::size_t j = head; j < head + take; ++j) {
          const std::size_t i = remaining[j];
          distance += std::abs(input[i] - current[i]);
        }
        if (distance <= budget) {
          for (std::size_t j = head; j < head + take; ++j) {
            current[remaining[j]] = input[remaining[j]];
          }
          budget -= distance;
          head += take;
        } else {
          const double share = budget / distance;
          for (std::size_t j = head; j < head + take; ++j) {
            const std::size_t i = remaining[j];
            current[i] += share * (input[i] - current[i]);
          }
          budget = 0.0;
        }
      }
      remaining.erase(remaining.begin(),
                      remaining.begin() + static_cast<long>(head));
      std::sort(remaining.begin(), remaining.end());
    }
    anchors.push_back(current);
  }
  return std::make_unique<AnchoredPath>(
      std::vector<double>(anchor_times.begin(), anchor_times.end()),
      std::move(anchors), baseline, input);
}

}  // namespace riemannopt
