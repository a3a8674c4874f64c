#pragma once

#include <functional>

#include <Eigen/Dense>

namespace bregman::spectral {

/// Eigenvalue support threshold for logs, negative powers and supports.
inline constexpr double kSupportThreshold = 1e-12;

struct Eigensystem {
  Eigen::VectorXd values;    // ascending
  Eigen::MatrixXcd vectors;  // columns
};

Eigensystem eigh(const Eigen::MatrixXcd& h);

/// f(h) by spectral calculus on the hermitian part of h.
Eigen::MatrixXcd apply(const Eigen::MatrixXcd& h, const std::function<double(double)>& f);
Eigen::MatrixXcd reconstruct(const Eigensystem& es, const std::function<double(double)>& f);

Eigen::MatrixXcd log(const Eigen::MatrixXcd& h);
Eigen::MatrixXcd exp(const Eigen::MatrixXcd& h);
/// sign(x)|x|^p on eigenvalues.
Eigen::MatrixXcd signed_power(const Eigen::MatrixXcd& h, double p);

double max_asymmetry(const Eigen::MatrixXcd& h);
double min_eigenvalue(const Eigen::MatrixXcd& h);
Eigen::MatrixXcd hermitian_part(const Eigen::MatrixXcd& h);

/// Orthogonal projector onto span of eigenvectors with eigenvalue > threshold.
Eigen::MatrixXcd support_projector(const Eigensystem& es, double threshold = kSupportThreshold);

/// Weight of `rho` outside the support of `sigma`: Tr((1 - P_sigma) rho).
double weight_outside_support(const Eigen::MatrixXcd& rho, const Eigensystem& sigma,
                              double threshold = kSupportThreshold);

double trace_re(const Eigen::MatrixXcd& h);

/// x log x with 0 log 0 = 0.
double xlogx(double x);

}  // namespace bregman::spectral
