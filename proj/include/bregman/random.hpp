#pragma once

#include <cmath>
#include <cstdint>

#include <Eigen/Dense>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

namespace bregman {

// Seeded generator.  Boost distributions are used instead of <random> ones
// because their output is specified by the implementation in the header,
// so a seed reproduces the same stream on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double normal() { return boost::random::normal_distribution<double>(0.0, 1.0)(engine_); }
  double uniform(double lo = 0.0, double hi = 1.0) {
    return boost::random::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  int uniform_int(int lo, int hi) {
    return boost::random::uniform_int_distribution<int>(lo, hi)(engine_);
  }
  std::uint64_t next_seed() { return engine_(); }

  Eigen::VectorXd normal_vector(Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = normal();
    return v;
  }
  Eigen::VectorXd uniform_vector(Eigen::Index n, double lo, double hi) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = uniform(lo, hi);
    return v;
  }
  /// Strictly positive entries, log-normal with the given spread.
  Eigen::VectorXd positive_vector(Eigen::Index n, double spread = 1.0) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = std::exp(spread * normal());
    return v;
  }
  /// Point of the open probability simplex.
  Eigen::VectorXd probability_vector(Eigen::Index n, double spread = 1.0) {
    Eigen::VectorXd v = positive_vector(n, spread);
    return v / v.sum();
  }
  /// Complex Ginibre matrix (iid standard complex normal entries).
  Eigen::MatrixXcd ginibre(Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXcd g(rows, cols);
    const double s = 1.0 / std::sqrt(2.0);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) g(i, j) = {s * normal(), s * normal()};
    return g;
  }
  Eigen::MatrixXcd hermitian(Eigen::Index side) {
    const Eigen::MatrixXcd g = ginibre(side, side);
    return 0.5 * (g + g.adjoint());
  }

 private:
  boost::random::mt19937_64 engine_;
};

}  // namespace bregman
