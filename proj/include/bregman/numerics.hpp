#pragma once

#include <functional>

namespace bregman::numerics {

/// Adaptive Simpson quadrature of f on [a, b] to absolute tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol = 1e-10, int max_depth = 60);

/// Root of a nondecreasing f on the bracket [lo, hi] (f(lo) <= 0 <= f(hi)).
///
/// Safeguarded Newton with a finite-difference slope; bisects whenever the
/// Newton step leaves the bracket or fails to shrink it.
double solve_increasing(const std::function<double(double)>& f, double lo, double hi,
                        double x_tol = 1e-15, int max_iter = 400);

/// Finds hi >= lo with f(hi) >= 0 by doubling from lo + step.
/// `finite(x)` reports whether f may be evaluated at x; out-of-domain
/// trial points are pulled back halfway towards the last admissible one.
/// Returns false when no sign change is found.
bool expand_bracket(const std::function<double(double)>& f,
                    const std::function<bool(double)>& admissible, double lo, double step,
                    double& hi, int max_doublings = 200);

}  // namespace bregman::numerics
