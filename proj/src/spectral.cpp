#include "bregman/spectral.hpp"

#include <cmath>

namespace bregman::spectral {

Eigen::MatrixXcd hermitian_part(const Eigen::MatrixXcd& h) {
  return 0.5 * (h + h.adjoint());
}

Eigensystem eigh(const Eigen::MatrixXcd& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(hermitian_part(h));
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Eigen::MatrixXcd reconstruct(const Eigensystem& es, const std::function<double(double)>& f) {
  Eigen::VectorXd fv(es.values.size());
  for (Eigen::Index i = 0; i < fv.size(); ++i) fv(i) = f(es.values(i));
  Eigen::MatrixXcd out = es.vectors * fv.asDiagonal() * es.vectors.adjoint();
  return hermitian_part(out);
}

Eigen::MatrixXcd apply(const Eigen::MatrixXcd& h, const std::function<double(double)>& f) {
  return reconstruct(eigh(h), f);
}

Eigen::MatrixXcd log(const Eigen::MatrixXcd& h) {
  return spectral::apply(h, [](double x) { return std::log(std::max(x, kSupportThreshold)); });
}

Eigen::MatrixXcd exp(const Eigen::MatrixXcd& h) {
  return spectral::apply(h, [](double x) { return std::exp(x); });
}

Eigen::MatrixXcd signed_power(const Eigen::MatrixXcd& h, double p) {
  // Fractional powers amplify round-off in numerically zero eigenvalues
  // (1e-17 ^ 0.25 ~ 6e-5), so those are clipped like the support.
  const double floor = p < 1.0 ? kSupportThreshold : 0.0;
  return spectral::apply(h, [p, floor](double x) {
    if (std::abs(x) <= floor || x == 0.0) return 0.0;
    return std::copysign(std::pow(std::abs(x), p), x);
  });
}

double max_asymmetry(const Eigen::MatrixXcd& h) {
  return (h - h.adjoint()).cwiseAbs().maxCoeff();
}

double min_eigenvalue(const Eigen::MatrixXcd& h) { return eigh(h).values.minCoeff(); }

Eigen::MatrixXcd support_projector(const Eigensystem& es, double threshold) {
  const Eigen::Index d = es.values.size();
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    if (es.values(i) > threshold) p += es.vectors.col(i) * es.vectors.col(i).adjoint();
  return p;
}

double weight_outside_support(const Eigen::MatrixXcd& rho, const Eigensystem& sigma,
                              double threshold) {
  double w = 0.0;
  for (Eigen::Index i = 0; i < sigma.values.size(); ++i) {
    if (sigma.values(i) > threshold) continue;
    const auto v = sigma.vectors.col(i);
    w += (v.adjoint() * rho * v)(0, 0).real();
  }
  return w;
}

double trace_re(const Eigen::MatrixXcd& h) { return h.trace().real(); }

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

}  // namespace bregman::spectral
