#include "riemannopt/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "riemannopt/error.hpp"
#include "riemannopt/random.hpp"

namespace riemannopt {

double Model::evaluate(std::span<const double> x) const {
  require_same_dimension(x.size(), input_dim(), "evaluate");
  return do_evaluate(x);
}

std::vector<double> Model::gradient(std::span<const double> x) const {
  require_same_dimension(x.size(), input_dim(), "gradient");
  std::vector<double> out(x.size(), 0.0);
  do_gradient(x, out);
  return out;
}

// ---------------------------------------------------------------- linear

LinearModel::LinearModel(std::vector<double> weights, double bias)
    : weights_(std::move(weights)), bias_(bias) {}

double LinearModel::do_evaluate(std::span<const double> x) const {
  double sum = bias_;
  for (std::size_t i = 0; i < x.size(); ++i) sum += weights_[i] * x[i];
  return sum;
}

void LinearModel::do_gradient(std::span<const double>,
                              std::span<double> out) const {
  std::copy(weights_.begin(), weights_.end(), out.begin());
}

// ------------------------------------------------------------- quadratic

QuadraticModel::QuadraticModel(std::size_t dim, std::vector<double> q,
                               std::vector<double> b, double c)
    : dim_(dim), q_(std::move(q)), b_(std::move(b)), c_(c) {
  if (q_.size() != dim_ * dim_) {
    throw InputShapeError("quadratic model: Q must be " +
                          std::to_string(dim_) + "x" + std::to_string(dim_));
  }
  if (b_.empty()) b_.assign(dim_, 0.0);
  require_same_dimension(b_.size(), dim_, "quadratic model linear term");
}

QuadraticModel QuadraticModel::sum_of_squares(std::size_t dim) {
  std::vector<double> q(dim * dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) q[i * dim + i] = 1.0;
  return QuadraticModel(dim, std::move(q), {}, 0.0);
}

double QuadraticModel::do_evaluate(std::span<const double> x) const {
  double sum = c_;
  for (std::size_t i = 0; i < dim_; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) row += q_[i * dim_ + j] * x[j];
    sum += x[i] * row + b_[i] * x[i];
  }
  return sum;
}

void QuadraticModel::do_gradient(std::span<const double> x,
                                 std::span<double> out) const {
  // (Q + Q^T) x + b
  for (std::size_t i = 0; i < dim_; ++i) {
    double g = b_[i];
    for (std::size_t j = 0; j < dim_; ++j) {
      g += (q_[i * dim_ + j] + q_[j * dim_ + i]) * x[j];
    }
    out[i] = g;
  }
}

// --------------------------------------------------------- gaussian bump

GaussianBumpModel::GaussianBumpModel(std::vector<double> center, double width,
                                     double height)
    : center_(std::move(center)), width_(width), height_(height) {
  if (!(width_ > 0.0) || !std::isfinite(width_)) {
    throw DomainError("gaussian-bump width must be strictly positive");
  }
}

double GaussianBumpModel::do_evaluate(std::span<const double> x) const {
  double r2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - center_[i];
    r2 += d * d;
  }
  return height_ * std::exp(-r2 / (2.0 * width_ * width_));
}

void GaussianBumpModel::do_gradient(std::span<const double> x,
                                    std::span<double> out) const {
  const double value = do_evaluate(x);
  const double inv_var = 1.0 / (width_ * width_);
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = -value * (x[i] - center_[i]) * inv_var;
  }
}

// -------------------------------------------------------------- tiny mlp

void MlpParameters::validate() const {
  auto check = [](std::size_t got, std::size_t want, const char* what) {
    if (got != want) {
      throw InputShapeError(std::string("mlp parameter ") + what +
                            ": expected " + std::to_string(want) +
                            " values, got " + std::to_string(got));
    }
  };
  if (input_dim == 0 || hidden1 == 0 || hidden2 == 0) {
    throw DomainError("mlp layer sizes must be positive");
  }
  check(w1.size(), hidden1 * input_dim, "w1");
  check(b1.size(), hidden1, "b1");
  check(w2.size(), hidden2 * hidden1, "w2");
  check(b2.size(), hidden2, "b2");
  check(w3.size(), hidden2, "w3");
  auto finite = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(),
                       [](double x) { return std::isfinite(x); });
  };
  if (!finite(w1) || !finite(b1) || !finite(w2) || !finite(b2) ||
      !finite(w3) || !std::isfinite(b3)) {
    throw NumericalError("mlp parameters contain non-finite values");
  }
}

MlpParameters init_mlp(const MlpInit& init) {
  if (init.input_dim == 0 || init.hidden1 == 0 || init.hidden2 == 0) {
    throw DomainError("mlp layer sizes must be positive");
  }
  Rng rng(init.seed);
  auto fill = [&rng](std::size_t n, double limit) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform(-limit, limit);
    return v;
  };
  auto limit = [&init](std::size_t fan_in) {
    return init.weight_gain * std::sqrt(3.0 / static_cast<double>(fan_in));
  };
  MlpParameters p;
  p.input_dim = init.input_dim;
  p.hidden1 = init.hidden1;
  p.hidden2 = init.hidden2;
  p.w1 = fill(init.hidden1 * init.input_dim, limit(init.input_dim));
  p.b1 = fill(init.hidden1, init.bias_scale);
  p.w2 = fill(init.hidden2 * init.hidden1, limit(init.hidden1));
  p.b2 = fill(init.hidden2, init.bias_scale);
  p.w3 = fill(init.hidden2, limit(init.hidden2));
  p.b3 = 0.0;
  p.sigmoid_output = init.sigmoid_output;
  return p;
}

TinyMlp::TinyMlp(MlpParameters params) : p_(std::move(params)) {
  p_.validate();
}

TinyMlp::Activations TinyMlp::forward(std::span<const double> x) const {
  Activations a;
  a.h1.resize(p_.hidden1);
  for (std::size_t i = 0; i < p_.hidden1; ++i) {
    const double* row = &p_.w1[i * p_.input_dim];
    double z = p_.b1[i];
    for (std::size_t j = 0; j < p_.input_dim; ++j) z += row[j] * x[j];
    a.h1[i] = std::tanh(z);
  }
  a.h2.resize(p_.hidden2);
  for (std::size_t i = 0; i < p_.hidden2; ++i) {
    const double* row = &p_.w2[i * p_.hidden1];
    double z = p_.b2[i];
    for (std::size_t j = 0; j < p_.hidden1; ++j) z += row[j] * a.h1[j];
    a.h2[i] = std::tanh(z);
  }
  a.pre_output = p_.b3;
  for (std::size_t i = 0; i < p_.hidden2; ++i) {
    a.pre_output += p_.w3[i] * a.h2[i];
  }
  return a;
}

namespace {
double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }
}  // namespace

double TinyMlp::do_evaluate(std::span<const double> x) const {
  const double z = forward(x).pre_output;
  return p_.sigmoid_output ? logistic(z) : z;
}

void TinyMlp::do_gradient(std::span<const double> x,
                          std::span<double> out) const {
  const Activations a = forward(x);
  double d_out = 1.0;
  if (p_.sigmoid_output) {
    const double s = logistic(a.pre_output);
    d_out = s * (1.0 - s);
  }
  // Back through layer 3 and the second tanh.
  std::vector<double> d_z2(p_.hidden2);
  for (std::size_t i = 0; i < p_.hidden2; ++i) {
    d_z2[i] = d_out * p_.w3[i] * (1.0 - a.h2[i] * a.h2[i]);
  }
  std::vector<double> d_z1(p_.hidden1, 0.0);
  for (std::size_t i = 0; i < p_.hidden2; ++i) {
    const double* row = &p_.w2[i * p_.hidden1];
    for (std::size_t j = 0; j < p_.hidden1; ++j) d_z1[j] += d_z2[i] * row[j];
  }
  for (std::size_t j = 0; j < p_.hidden1; ++j) {
    d_z1[j] *= 1.0 - a.h1[j] * a.h1[j];
  }
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < p_.hidden1; ++i) {
    const double* row = &p_.w1[i * p_.input_dim];
    for (std::size_t j = 0; j < p_.input_dim; ++j) out[j] += d_z1[i] * row[j];
  }
}

// --------------------------------------------------------------- factory

ModelKind parse_model_kind(const std::string& text) {
  if (text == "linear") return ModelKind::kLinear;
  if (text == "quadratic") return ModelKind::kQuadratic;
  if (text == "gaussian-bump") return ModelKind::kGaussianBump;
  if (text == "tiny-mlp") return ModelKind::kTinyMlp;
  throw DomainError("unknown model kind '" + text + "'");
}

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kLinear: return "linear";
    case ModelKind::kQuadratic: return "quadratic";
    case ModelKind::kGaussianBump: return "gaussian-bump";
    case ModelKind::kTinyMlp: return "tiny-mlp";
  }
  return "unknown";
}

std::unique_ptr<Model> make_model(const BuiltinModelSpec& spec) {
  if (spec.input_dim == 0) throw DomainError("model input_dim must be > 0");
  Rng rng(spec.seed);
  switch (spec.kind) {
    case ModelKind::kLinear: {
      std::vector<double> w = spec.weights;
      if (w.empty()) {
        w.resize(spec.input_dim);
        for (double& v : w) v = rng.uniform(-1.0, 1.0);
      }
      require_same_dimension(w.size(), spec.input_dim, "linear weights");
      return std::make_unique<LinearModel>(std::move(w), spec.bias);
    }
    case ModelKind::kQuadratic:
      return std::make_unique<QuadraticModel>(
          QuadraticModel::sum_of_squares(spec.input_dim));
    case ModelKind::kGaussianBump: {
      std::vector<double> c = spec.center;
      if (c.empty()) c.assign(spec.input_dim, 0.5);
      require_same_dimension(c.size(), spec.input_dim, "bump center");
      return std::make_unique<GaussianBumpModel>(std::move(c), spec.width,
                                                 spec.height);
    }
    case ModelKind::kTinyMlp: {
      MlpInit init = spec.mlp;
      init.input_dim = spec.input_dim;
      init.seed = spec.seed;
      return std::make_unique<TinyMlp>(init);
    }
  }
  throw DomainError("unhandled model kind");
}

double gradient_check(const Model& model, std::span<const double> x,
                      double step) {
  if (!(step > 0.0)) throw DomainError("gradient_check: step must be > 0");
  const std::vector<double> analytic = model.gradient(x);
  std::vector<double> probe(x.begin(), x.end());
  double worst = 0.0;
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const double x0 = probe[i];
    auto f_at = [&](double offset) {
      probe[i] = x0 + offset;
      return model.evaluate(probe);
    };
    const double numeric = (f_at(step) - f_at(-step)) / (2.0 * step);
    probe[i] = x0;
    const double rel =
        std::abs(analytic[i] - numeric) / (std::abs(analytic[i]) + 1e-12);
    worst = std::max(worst, rel);
  }
  return worst;
}

}  // namespace riemannopt
