#include "bregman/optimize.hpp"

#include <cmath>
#include <limits>

namespace bregman::optimize {

namespace {

double safe(const Objective& f, const Eigen::VectorXd& x) {
  const double v = f(x);
  return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

}  // namespace

Eigen::VectorXd numeric_gradient(const Objective& f, const Eigen::VectorXd& x, double step) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd y = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = step * std::max(1.0, std::abs(x(i)));
    y(i) = x(i) + h;
    const double fp = safe(f, y);
    y(i) = x(i) - h;
    const double fm = safe(f, y);
    y(i) = x(i);
    g(i) = (fp - fm) / (2.0 * h);
  }
  return g;
}

Result bfgs(const Objective& f, Eigen::VectorXd x0, const Options& opt) {
  const Eigen::Index n = x0.size();
  Result r;
  r.x = std::move(x0);
  r.value = safe(f, r.x);
  if (!std::isfinite(r.value)) return r;
  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd g = numeric_gradient(f, r.x, opt.step);
  r.history.push_back(r.value);
  for (int it = 0; it < opt.max_iter; ++it) {
    r.iterations = it + 1;
    if (!g.allFinite()) break;
    if (g.lpNorm<Eigen::Infinity>() <= opt.grad_tol) {
      r.converged = true;
      break;
    }
    Eigen::VectorXd d = -H * g;
    double slope = g.dot(d);
    if (!(slope < 0.0)) {  // reset a non-descent direction
      H.setIdentity();
      d = -g;
      slope = -g.squaredNorm();
    }
    double t = 1.0, fn = 0.0;
    Eigen::VectorXd xn;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      xn = r.x + t * d;
      fn = safe(f, xn);
      if (fn <= r.value + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      if (H.isIdentity()) {  // no progress possible at this resolution
        r.converged = g.lpNorm<Eigen::Infinity>() <= 1e3 * opt.grad_tol;
        break;
      }
      H.setIdentity();
      continue;
    }
    const Eigen::VectorXd gn = numeric_gradient(f, xn, opt.step);
    const Eigen::VectorXd s = xn - r.x, y = gn - g;
    const double sy = s.dot(y);
    if (sy > 1e-16 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
      H = (I - rho * s * y.transpose()) * H * (I - rho * y * s.transpose()) +
          rho * s * s.transpose();
    }
    const double drop = r.value - fn;
    r.x = xn;
    r.value = fn;
    g = gn;
    r.history.push_back(fn);
    if (drop <= 1e-16 * std::max(1.0, std::abs(fn)) && s.lpNorm<Eigen::Infinity>() <= 1e-14) {
      r.converged = true;
      break;
    }
  }
  return r;
}

}  // namespace bregman::optimize
