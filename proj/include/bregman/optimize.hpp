#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace bregman::optimize {

using Objective = std::function<double(const Eigen::VectorXd&)>;

struct Options {
  int max_iter = 2000;
  double grad_tol = 1e-11;
  double step = 1e-6;  // central-difference step (relative)
};

struct Result {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;  // objective per iteration
};

Eigen::VectorXd numeric_gradient(const Objective& f, const Eigen::VectorXd& x, double step);

/// BFGS with central-difference gradients and backtracking (Armijo) line
/// search.  Non-finite objective values are treated as +inf, so the search
/// backs off the boundary of the feasible region.
Result bfgs(const Objective& f, Eigen::VectorXd x0, const Options& opt = {});

}  // namespace bregman::optimize
