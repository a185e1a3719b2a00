#include "riemannopt/input_vector.hpp"

#include <cmath>
#include <string>

#include "riemannopt/error.hpp"

namespace riemannopt {

InputVector::InputVector(std::vector<double> values)
    : values_(std::move(values)) {
  validate();
}

InputVector::InputVector(std::vector<double> values, ImageShape shape)
    : values_(std::move(values)), shape_(shape) {
  validate();
}

InputVector InputVector::zeros(std::size_t dim) {
  return InputVector(std::vector<double>(dim, 0.0));
}

InputVector InputVector::filled(std::size_t dim, double value) {
  return InputVector(std::vector<double>(dim, value));
}

InputVector InputVector::with_values(std::vector<double> values) const {
  if (values.size() != values_.size()) {
    throw InputShapeError("with_values: expected " +
                          std::to_string(values_.size()) + " values, got " +
                          std::to_string(values.size()));
  }
  InputVector out;
  out.values_ = std::move(values);
  out.shape_ = shape_;
  out.validate();
  return out;
}

void InputVector::validate() const {
  if (shape_ && shape_->size() != values_.size()) {
    throw InputShapeError(
        "image shape " + std::to_string(shape_->height) + "x" +
        std::to_string(shape_->width) + "x" +
        std::to_string(shape_->channels) + " does not match " +
        std::to_string(values_.size()) + " values");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw NumericalError("non-finite input value at index " +
                           std::to_string(i));
    }
  }
}

void require_same_dimension(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw InputShapeError(std::string(what) + ": dimension mismatch (" +
                          std::to_string(a) + " vs " + std::to_string(b) +
                          ")");
  }
}

}  // namespace riemannopt
