#include "riemannopt/powell.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <utility>
#include <vector>

#include "riemannopt/error.hpp"

namespace riemannopt {

namespace {

constexpr double kGolden = 1.618033988749895;
constexpr double kCGold = 0.3819660112501051;
constexpr double kTiny = 1e-20;
constexpr double kZeps = 1e-18;
constexpr int kMaxBracketSteps = 200;
constexpr int kMaxBrentSteps = 200;
constexpr double kGrowLimit = 100.0;
// Scan steps are +-2^(i/2) for i in [kScanMinExponent, kScanMaxExponent].
constexpr int kScanMinExponent = -12;
constexpr int kScanMaxExponent = 6;

class CountedObjective {
 public:
  explicit CountedObjective(const Objective& f) : f_(f) {}

  double operator()(std::span<const double> x) {
    ++evaluations_;
    const double v = f_(x);
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "powell: objective returned " << v << " at evaluation "
          << evaluations_;
      throw NumericalError(msg.str());
    }
    return v;
  }

  long evaluations() const { return evaluations_; }

 private:
  const Objective& f_;
  long evaluations_ = 0;
};

struct Bracket {
  double a, b, c;
  double fa, fb, fc;
};

// Downhill bracketing with parabolic extrapolation.
template <class F>
Bracket bracket_minimum(F& f, double a, double b) {
  double fa = f(a);
  double fb = f(b);
  if (fb > fa) {
    std::swap(a, b);
    std::swap(fa, fb);
  }
  double c = b + kGolden * (b - a);
  double fc = f(c);
  for (int step = 0; fb > fc && step < kMaxBracketSteps; ++step) {
    const double r = (b - a) * (fb - fc);
    const double q = (b - c) * (fb - fa);
    double denom = q - r;
    if (std::abs(denom) < kTiny) denom = denom < 0 ? -kTiny : kTiny;
    double u = b - ((b - c) * q - (b - a) * r) / (2.0 * denom);
    const double ulim = b + kGrowLimit * (c - b);
    double fu;
    if ((b - u) * (u - c) > 0.0) {
      fu = f(u);
      if (fu < fc) {
        return {b, u, c, fb, fu, fc};
      }
      if (fu > fb) {
        return {a, b, u, fa, fb, fu};
      }
      u = c + kGolden * (c - b);
      fu = f(u);
    } else if ((c - u) * (u - ulim) > 0.0) {
      fu = f(u);
      if (fu < fc) {
        b = c;
        c = u;
        u = c + kGolden * (c - b);
        fb = fc;
        fc = fu;
        fu = f(u);
      }
    } else if ((u - ulim) * (ulim - c) >= 0.0) {
      u = ulim;
      fu = f(u);
    } else {
      u = c + kGolden * (c - b);
      fu = f(u);
    }
    a = b;
    b = c;
    c = u;
    fa = fb;
    fb = fc;
    fc = fu;
  }
  return {a, b, c, fa, fb, fc};
}

// Brent's method: golden-section steps with parabolic interpolation.
template <class F>
std::pair<double, double> brent(F& f, const Bracket& br, double tol) {
  double a = std::min(br.a, br.c);
  double b = std::max(br.a, br.c);
  double x = br.b, w = br.b, v = br.b;
  double fx = br.fb, fw = br.fb, fv = br.fb;
  double d = 0.0, e = 0.0;
  for (int iter = 0; iter < kMaxBrentSteps; ++iter) {
    const double xm = 0.5 * (a + b);
    const double tol1 = tol * std::abs(x) + kZeps;
    const double tol2 = 2.0 * tol1;
    if (std::abs(x - xm) <= tol2 - 0.5 * (b - a)) break;
    if (std::abs(e) > tol1) {
      const double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::abs(q);
      const double etemp = e;
      e = d;
      if (std::abs(p) >= std::abs(0.5 * q * etemp) || p <= q * (a - x) ||
          p >= q * (b - x)) {
        e = x >= xm ? a - x : b - x;
        d = kCGold * e;
      } else {
        d = p / q;
        const double u = x + d;
        if (u - a < tol2 || b - u < tol2) d = xm - x >= 0 ? tol1 : -tol1;
      }
    } else {
      e = x >= xm ? a - x : b - x;
      d = kCGold * e;
    }
    const double u =
        std::abs(d) >= tol1 ? x + d : x + (d >= 0 ? tol1 : -tol1);
    const double fu = f(u);
    if (fu <= fx) {
      if (u >= x) a = x; else b = x;
      v = w; w = x; x = u;
      fv = fw; fw = fx; fx = fu;
    } else {
      if (u < x) a = u; else b = u;
      if (fu <= fw || w == x) {
        v = w; w = u;
        fv = fw; fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u;
        fv = fu;
      }
    }
  }
  return {x, fx};
}

// Coarse look at steps +-2^(i/2) before bracketing, so a line search on a
// multimodal slice starts in the best basin it can see instead of the one
// nearest to lambda = 0.
template <class F>
Bracket scan_bracket(F& f, double f_zero) {
  std::vector<double> lambdas;
  for (int i = kScanMaxExponent; i >= kScanMinExponent; --i) {
    lambdas.push_back(-std::exp2(i / 2.0));
  }
  lambdas.push_back(0.0);
  for (int i = kScanMinExponent; i <= kScanMaxExponent; ++i) {
    lambdas.push_back(std::exp2(i / 2.0));
  }
  std::vector<double> values(lambdas.size());
  std::size_t best = 0;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    values[i] = lambdas[i] == 0.0 ? f_zero : f(lambdas[i]);
    if (values[i] < values[best] ||
        (values[i] == values[best] && lambdas[i] == 0.0)) {
      best = i;
    }
  }
  if (best == 0 || best + 1 == lambdas.size()) {
    // Still falling at the edge of the scan: keep extending outward.
    const std::size_t inner = best == 0 ? 1 : best - 1;
    return bracket_minimum(f, lambdas[inner], lambdas[best]);
  }
  return {lambdas[best - 1], lambdas[best], lambdas[best + 1],
          values[best - 1], values[best], values[best + 1]};
}

// Minimizes along `direction` from `point`, moving the point and rescaling
// the direction by the step taken. Returns the new objective value.
double line_minimize(CountedObjective& f, std::vector<double>& point,
                     std::vector<double>& direction, double f_point,
                     double tol) {
  std::vector<double> trial(point.size());
  auto along = [&](double lambda) {
    if (lambda == 0.0) return f_point;
    for (std::size_t i = 0; i < point.size(); ++i) {
      trial[i] = point[i] + lambda * direction[i];
    }
    return f(trial);
  };
  const Bracket br = scan_bracket(along, f_point);
  auto [lambda, f_min] = brent(along, br, tol);
  if (!(f_min < f_point) || lambda == 0.0) {
    // Only strict improvements move the point.
    return f_point;
  }
  for (std::size_t i = 0; i < point.size(); ++i) {
    direction[i] *= lambda;
    point[i] += direction[i];
  }
  return f_min;
}

}  // namespace

PowellResult powell_minimize(const Objective& objective,
                             std::vector<double> start,
                             const PowellOptions& options) {
  if (!(options.tol > 0.0)) throw DomainError("powell: tol must be > 0");
  if (start.empty()) throw DomainError("powell: empty start vector");
  CountedObjective f(objective);
  const std::size_t n = start.size();

  std::vector<std::vector<double>> directions(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) directions[i][i] = 1.0;

  PowellResult result;
  std::vector<double> p = std::move(start);
  double f_ret = f(p);
  std::vector<double> p_start = p;

  for (int iter = 1; iter <= options.max_iter; ++iter) {
    result.iterations = iter;
    const double f_cycle = f_ret;
    std::size_t biggest = 0;
    double biggest_drop = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double before = f_ret;
      f_ret = line_minimize(f, p, directions[i], f_ret, options.line_tol);
      if (before - f_ret > biggest_drop) {
        biggest_drop = before - f_ret;
        biggest = i;
      }
    }
    if (f_cycle - f_ret < options.tol) {
      result.converged = true;
      break;
    }
    std::vector<double> extrapolated(n), net(n);
    for (std::size_t j = 0; j < n; ++j) {
      extrapolated[j] = 2.0 * p[j] - p_start[j];
      net[j] = p[j] - p_start[j];
    }
    p_start = p;
    const double f_ext = f(extrapolated);
    if (f_ext < f_cycle) {
      const double t =
          2.0 * (f_cycle - 2.0 * f_ret + f_ext) *
              std::pow(f_cycle - f_ret - biggest_drop, 2) -
          biggest_drop * std::pow(f_cycle - f_ext, 2);
      if (t < 0.0) {
        f_ret = line_minimize(f, p, net, f_ret, options.line_tol);
        directions[biggest] = directions[n - 1];
        directions[n - 1] = net;
      }
    }
  }
  result.argmin = std::move(p);
  result.value = f_ret;
  result.evaluations = f.evaluations();
  return result;
}

}  // namespace riemannopt
