#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace riemannopt {

struct ImageShape {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 1;

  std::size_t size() const { return height * width * channels; }
  std::size_t pixels() const { return height * width; }
  bool operator==(const ImageShape&) const = default;
};

// Flat feature vector. Image data is stored row-major with interleaved
// channels: index = (row * width + col) * channels + channel.
class InputVector {
 public:
  InputVector() = default;
  explicit InputVector(std::vector<double> values);
  InputVector(std::vector<double> values, ImageShape shape);

  static InputVector zeros(std::size_t dim);
  static InputVector filled(std::size_t dim, double value);

  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  std::span<double> mutable_values() { return values_; }
  const std::vector<double>& vector() const { return values_; }
  const std::optional<ImageShape>& shape() const { return shape_; }

  double operator[](std::size_t i) const { return values_[i]; }

  // Same shape metadata, new values. Throws InputShapeError on length
  // mismatch and NumericalError on non-finite values.
  InputVector with_values(std::vector<double> values) const;

  bool operator==(const InputVector&) const = default;

 private:
  void validate() const;

  std::vector<double> values_;
  std::optional<ImageShape> shape_;
};

// Throws InputShapeError unless a.size() == b.size().
void require_same_dimension(std::size_t a, std::size_t b, const char* what);

}  // namespace riemannopt
