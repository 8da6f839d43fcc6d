#pragma once

#include <functional>
#include <span>
#include <vector>

namespace zipfit::optimize {

struct ScalarOptimum {
  double x = 0.0;
  double value = 0.0;
  int evaluations = 0;
};

/// Maximizes a unimodal f on [lo, hi] by golden-section search until the
/// bracket is narrower than tol.
ScalarOptimum golden_section_maximize(const std::function<double(double)>& f, double lo, double hi,
                                      double tol);

struct SimplexOptions {
  double f_tolerance = 1e-8;  // stop when max f - min f over the simplex is below this
  int max_evaluations = 10000;
};

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

/// Nelder-Mead minimization. Non-finite objective values are treated as
/// +infinity, which lets callers encode hard constraints by returning NaN
/// or inf outside the feasible region.
SimplexResult nelder_mead_minimize(const std::function<double(std::span<const double>)>& f,
                                   std::vector<double> start, std::span<const double> steps,
                                   const SimplexOptions& options = {});

}  // namespace zipfit::optimize
