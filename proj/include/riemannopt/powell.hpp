#pragma once

#include <functional>
#include <span>
#include <vector>

namespace riemannopt {

struct PowellOptions {
  double tol = 1e-8;        // stop when a full cycle lowers f by less
  int max_iter = 200;       // cycles
  double line_tol = 1e-10;  // fractional tolerance of each line search
};

struct PowellResult {
  std::vector<double> argmin;
  double value = 0.0;
  int iterations = 0;
  long evaluations = 0;
  bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

// Powell's conjugate-direction method. Each cycle runs a line search (coarse
// scan of steps +-2^(i/2), i = -12..6, bracket around the best, Brent refinement)
// along every direction in the set (initially the coordinate
// axes) and then swaps the direction of largest decrease for the net
// displacement of the cycle when the replacement test allows it.
// Throws NumericalError if the objective is ever non-finite. Running out of
// cycles is not an error; the best point so far comes back with
// converged == false.
PowellResult powell_minimize(const Objective& objective,
                             std::vector<double> start,
                             const PowellOptions& options = {});

}  // namespace riemannopt
