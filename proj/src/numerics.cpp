#include "bregman/numerics.hpp"

#include <cmath>
#include <limits>

namespace bregman::numerics {

namespace {

double simpson_step(const std::function<double(double)>& f, double a, double fa, double b,
                    double fb, double m, double fm, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, int max_depth) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, fa, b, fb, m, fm, whole, abs_tol, max_depth);
}

double solve_increasing(const std::function<double(double)>& f, double lo, double hi,
                        double x_tol, int max_iter) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo >= 0.0) return lo;
  if (fhi <= 0.0) return hi;
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < max_iter; ++it) {
    const double fx = f(x);
    if (fx == 0.0) return x;
    if (fx < 0.0) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
      fhi = fx;
    }
    if (hi - lo <= x_tol * (1.0 + std::abs(x))) break;
    const double h = 1e-7 * (1.0 + std::abs(x));
    const double xa = std::max(lo, x - h), xb = std::min(hi, x + h);
    double next = 0.5 * (lo + hi);
    if (xb > xa) {
      const double slope = (f(xb) - f(xa)) / (xb - xa);
      if (slope > 0.0 && std::isfinite(slope)) {
        const double newton = x - fx / slope;
        // accept only steps that stay strictly inside the bracket
        if (newton > lo && newton < hi) next = newton;
      }
    }
    // guard against Newton stalling on one side of the root
    if (std::abs(next - x) < 0.25 * x_tol * (1.0 + std::abs(x))) {
      next = fx < 0.0 ? std::min(hi, x + x_tol * (1.0 + std::abs(x)))
                      : std::max(lo, x - x_tol * (1.0 + std::abs(x)));
    }
    x = next;
  }
  // final regula falsi between the bracket ends
  if (fhi - flo > 0.0 && std::isfinite(fhi - flo)) {
    const double rf = lo - flo * (hi - lo) / (fhi - flo);
    if (rf >= lo && rf <= hi) return rf;
  }
  return 0.5 * (lo + hi);
}

bool expand_bracket(const std::function<double(double)>& f,
                    const std::function<bool(double)>& admissible, double lo, double step,
                    double& hi, int max_doublings) {
  double last_ok = lo;
  double trial = lo + step;
  for (int k = 0; k < max_doublings; ++k) {
    int pulls = 0;
    while (!admissible(trial) && pulls < 200) {
      trial = 0.5 * (last_ok + trial);
      ++pulls;
    }
    if (!admissible(trial)) return false;
    const double ft = f(trial);
    if (ft >= 0.0) {
      hi = trial;
      return true;
    }
    if (trial == last_ok) return false;
    const double width = trial - lo;
    last_ok = trial;
    trial = lo + 2.0 * width;
  }
  return false;
}

}  // namespace bregman::numerics
