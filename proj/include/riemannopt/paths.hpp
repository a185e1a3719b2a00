#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "riemannopt/input_vector.hpp"
#include "riemannopt/model.hpp"

namespace riemannopt {

// A path gamma: [0, 1] -> R^d from a baseline (t = 0) to an input (t = 1).
// Every path kind is parameterized on the same unit interval so the
// quadrature and schedule code never needs to know which path it is
// integrating along.
class Path {
 public:
  Path(InputVector baseline, InputVector input);
  virtual ~Path() = default;

  std::size_t dimension() const { return input_.size(); }
  const InputVector& baseline() const { return baseline_; }
  const InputVector& input() const { return input_; }

  // point(0) == baseline() and point(1) == input() exactly.
  InputVector point(double t) const;
  // d gamma / dt
  std::vector<double> velocity(double t) const;

 protected:
  // Called for t strictly inside (0, 1).
  virtual std::vector<double> interior_point(double t) const = 0;
  // Called for every t in [0, 1].
  virtual std::vector<double> velocity_at(double t) const = 0;

 private:
  InputVector baseline_;
  InputVector input_;
};

// gamma(t) = x' + t (x - x')
class LinearPath final : public Path {
 public:
  LinearPath(InputVector baseline, InputVector input);

 protected:
  std::vector<double> interior_point(double t) const override;
  std::vector<double> velocity_at(double t) const override;

 private:
  std::vector<double> delta_;
};

std::unique_ptr<Path> linear_path(const InputVector& baseline,
                                  const InputVector& input);

// Square (2r+1) x (2r+1) grid, row-major, offsets -r..r on both axes.
struct Kernel2D {
  int radius = 0;
  std::vector<double> weights;

  int side() const { return 2 * radius + 1; }
  double at(int dy, int dx) const {
    return weights[static_cast<std::size_t>((dy + radius) * side() +
                                            (dx + radius))];
  }
};

// Weights proportional to exp(-(x^2 + y^2) / alpha), renormalized after
// truncation to sum to 1.
Kernel2D gaussian_kernel(double alpha, int radius);

// One axis of gaussian_kernel; the 2D kernel is the outer product of this
// with itself.
std::vector<double> gaussian_kernel_1d(double alpha, int radius);

// Convolve every channel of `image` with the truncated Gaussian of scale
// alpha using half-sample mirror padding. alpha == 0 returns the image as is.
// Mirror padding keeps the blur a smoothing operation on the image window:
// total variation never grows with alpha, and very large alpha tends to the
// image mean. Replicate padding lets edge pixels leak inward instead.
std::vector<double> gaussian_blur(std::span<const double> image,
                                  const ImageShape& shape, double alpha,
                                  int radius);

struct BlurPathConfig {
  double alpha_max = 0.0;     // kernel scale at t = 0, in pixels^2
  int kernel_radius = 0;      // truncation radius in pixels
  double velocity_step = 1e-3;

  // alpha_max = 0.5 * max(h, w)^2 and the smallest radius satisfying the
  // three-sigma rule.
  static BlurPathConfig defaults_for(const ImageShape& shape);
  // Smallest radius with radius >= 3 sqrt(alpha_max / 2).
  static int min_radius(double alpha_max);
  void validate() const;
};

// Blur scale alpha(t) = alpha_max (1 - t): t = 0 is the maximally blurred
// image, t = 1 the sharp input. The velocity is a central difference in t
// (one-sided within velocity_step of the ends), which matches the discrete
// convolution exactly including the edge padding.
class BlurPath final : public Path {
 public:
  BlurPath(const InputVector& input, BlurPathConfig config);

  const BlurPathConfig& config() const { return config_; }
  double alpha_at(double t) const { return config_.alpha_max * (1.0 - t); }

 protected:
  std::vector<double> interior_point(double t) const override;
  std::vector<double> velocity_at(double t) const override;

 private:
  std::vector<double> blurred(double t) const;

  BlurPathConfig config_;
  ImageShape shape_;
};

std::unique_ptr<Path> blur_path(const InputVector& input,
                                const BlurPathConfig& config);

// Piecewise-linear path through precomputed anchors at increasing times
// 0 = t_0 < ... < t_n = 1.
class AnchoredPath final : public Path {
 public:
  AnchoredPath(std::vector<double> anchor_times,
               std::vector<std::vector<double>> anchors,
               const InputVector& baseline, const InputVector& input);

  std::span<const double> anchor_times() const { return times_; }
  const std::vector<std::vector<double>>& anchors() const { return anchors_; }

 protected:
  std::vector<double> interior_point(double t) const override;
  std::vector<double> velocity_at(double t) const override;

 private:
  std::size_t segment(double t) const;

  std::vector<double> times_;
  std::vector<std::vector<double>> anchors_;
};

// Greedy guided path with `steps` equal segments. Within every segment an
// l1 budget proportional to the segment length is spent moving the
// not-yet-arrived features whose |df/dx_i| lies in the lowest `fraction`
// quantile to their input values; if that subset arrives early the rule is
// reapplied to what remains.
std::unique_ptr<AnchoredPath> guided_path(const Model& model,
                                          const InputVector& baseline,
                                          const InputVector& input, int steps,
                                          double fraction);

// Same rule with explicit anchor times (strictly increasing, first 0, last
// 1). Lets the path segments line up with a non-uniform sample schedule.
std::unique_ptr<AnchoredPath> guided_path(const Model& model,
                                          const InputVector& baseline,
                                          const InputVector& input,
                                          std::span<const double> anchor_times,
                                          double fraction);

}  // namespace riemannopt
