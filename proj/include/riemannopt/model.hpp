#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "riemannopt/input_vector.hpp"

namespace riemannopt {

// Scalar field f: R^d -> R with an exact gradient. Implementations are
// immutable after construction, so evaluate/gradient may be called from
// several threads at once.
class Model {
 public:
  virtual ~Model() = default;

  virtual std::size_t input_dim() const = 0;
  virtual std::string name() const = 0;

  double evaluate(std::span<const double> x) const;
  double evaluate(const InputVector& x) const { return evaluate(x.values()); }

  std::vector<double> gradient(std::span<const double> x) const;
  std::vector<double> gradient(const InputVector& x) const {
    return gradient(x.values());
  }

 protected:
  // Inputs are already dimension-checked.
  virtual double do_evaluate(std::span<const double> x) const = 0;
  virtual void do_gradient(std::span<const double> x,
                           std::span<double> out) const = 0;
};

// f(x) = w.x + b
class LinearModel final : public Model {
 public:
  LinearModel(std::vector<double> weights, double bias = 0.0);

  std::size_t input_dim() const override { return weights_.size(); }
  std::string name() const override { return "linear"; }
  std::span<const double> weights() const { return weights_; }
  double bias() const { return bias_; }

 protected:
  double do_evaluate(std::span<const double> x) const override;
  void do_gradient(std::span<const double> x,
                   std::span<double> out) const override;

 private:
  std::vector<double> weights_;
  double bias_;
};

// f(x) = x^T Q x + b.x + c with a dense row-major Q.
class QuadraticModel final : public Model {
 public:
  QuadraticModel(std::size_t dim, std::vector<double> q,
                 std::vector<double> b, double c = 0.0);

  // f(x) = sum_i x_i^2
  static QuadraticModel sum_of_squares(std::size_t dim);

  std::size_t input_dim() const override { return dim_; }
  std::string name() const override { return "quadratic"; }

 protected:
  double do_evaluate(std::span<const double> x) const override;
  void do_gradient(std::span<const double> x,
                   std::span<double> out) const override;

 private:
  std::size_t dim_;
  std::vector<double> q_;
  std::vector<double> b_;
  double c_;
};

// f(x) = height * exp(-|x - center|^2 / (2 width^2)), width > 0.
class GaussianBumpModel final : public Model {
 public:
  GaussianBumpModel(std::vector<double> center, double width,
                    double height = 1.0);

  std::size_t input_dim() const override { return center_.size(); }
  std::string name() const override { return "gaussian-bump"; }

 protected:
  double do_evaluate(std::span<const double> x) const override;
  void do_gradient(std::span<const double> x,
                   std::span<double> out) const override;

 private:
  std::vector<double> center_;
  double width_;
  double height_;
};

// Weights of a d -> h1 -> h2 -> 1 perceptron. Matrices are row-major with
// one row per output unit.
struct MlpParameters {
  std::size_t input_dim = 0;
  std::size_t hidden1 = 0;
  std::size_t hidden2 = 0;
  std::vector<double> w1;  // hidden1 x input_dim
  std::vector<double> b1;  // hidden1
  std::vector<double> w2;  // hidden2 x hidden1
  std::vector<double> b2;  // hidden2
  std::vector<double> w3;  // hidden2
  double b3 = 0.0;
  bool sigmoid_output = true;

  void validate() const;
  bool operator==(const MlpParameters&) const = default;
};

struct MlpInit {
  std::size_t input_dim = 0;
  std::size_t hidden1 = 16;
  std::size_t hidden2 = 8;
  std::uint64_t seed = 7;
  // Weights are drawn from U(-a, a), a = weight_gain * sqrt(3 / fan_in).
  double weight_gain = 1.0;
  // Hidden biases are drawn from U(-bias_scale, bias_scale).
  double bias_scale = 0.5;
  bool sigmoid_output = true;
};

// Seeded initialization; identical MlpInit gives bit-identical weights.
MlpParameters init_mlp(const MlpInit& init);

// tanh hidden layers, optional logistic output.
class TinyMlp final : public Model {
 public:
  explicit TinyMlp(MlpParameters params);
  explicit TinyMlp(const MlpInit& init) : TinyMlp(init_mlp(init)) {}

  std::size_t input_dim() const override { return p_.input_dim; }
  std::string name() const override { return "tiny-mlp"; }
  const MlpParameters& parameters() const { return p_; }

 protected:
  double do_evaluate(std::span<const double> x) const override;
  void do_gradient(std::span<const double> x,
                   std::span<double> out) const override;

 private:
  struct Activations {
    std::vector<double> h1;
    std::vector<double> h2;
    double pre_output;
  };
  Activations forward(std::span<const double> x) const;

  MlpParameters p_;
};

enum class ModelKind { kLinear, kQuadratic, kGaussianBump, kTinyMlp };

ModelKind parse_model_kind(const std::string& text);
std::string to_string(ModelKind kind);

// Description of a builtin model. Fields not used by `kind` are ignored.
// Empty parameter vectors fall back to seeded random draws so that a spec
// with only kind + input_dim is usable.
struct BuiltinModelSpec {
  ModelKind kind = ModelKind::kTinyMlp;
  std::size_t input_dim = 0;
  std::uint64_t seed = 7;

  std::vector<double> weights;  // linear
  double bias = 0.0;            // linear
  std::vector<double> center;   // gaussian-bump
  double width = 1.0;           // gaussian-bump
  double height = 1.0;          // gaussian-bump
  MlpInit mlp;                  // tiny-mlp (input_dim and seed overridden)
};

std::unique_ptr<Model> make_model(const BuiltinModelSpec& spec);

// max_i |analytic_i - numeric_i| / (|analytic_i| + 1e-12), where numeric is
// the central difference (f(x + h e_i) - f(x - h e_i)) / 2h with h = step.
double gradient_check(const Model& model, std::span<const double> x,
                      double step);
inline double gradient_check(const Model& model, const InputVector& x,
                             double step) {
  return gradient_check(model, x.values(), step);
}

}  // namespace riemannopt
