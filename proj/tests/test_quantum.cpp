#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "bregman/divergences.hpp"
#include "bregman/quantum.hpp"
#include "bregman/spectral.hpp"

using namespace bregman;
using namespace bregman::quantum;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using cd = std::complex<double>;

namespace {

MatrixXcd diag(std::initializer_list<double> xs) {
  VectorXd d(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) d(i++) = x;
  return d.cast<cd>().asDiagonal();
}

MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
  MatrixXcd k(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return k;
}

double dist(const DensityMatrix& a, const MatrixXcd& b) { return (a.entries() - b).norm(); }

}  // namespace

TEST_CASE("density matrices validate their entries") {
  CHECK_NOTHROW(DensityMatrix(diag({0.7, 0.3})));
  CHECK_THROWS_AS(DensityMatrix(diag({0.7, 0.4})), ArgumentError);
  CHECK_NOTHROW(DensityMatrix(diag({0.7, 0.4}), false));
  CHECK_THROWS_AS(DensityMatrix(diag({1.2, -0.2})), ArgumentError);
  MatrixXcd nh = diag({0.5, 0.5});
  nh(0, 1) = 0.1;
  CHECK_THROWS_AS(DensityMatrix{nh}, ArgumentError);
  Rng rng(1);
  const DensityMatrix r = random_density(3, 2, rng);
  CHECK(r.trace() == doctest::Approx(1.0));
  CHECK((spectral::eigh(r.entries()).values.array() > 1e-12).count() == 2);
}

TEST_CASE("lueders update") {
  const DensityMatrix plus = pure_state(VectorXcd::Ones(2));
  CHECK(dist(lueders_update(plus, basis_projectors(2)), 0.5 * MatrixXcd::Identity(2, 2)) < 1e-12);
  const DensityMatrix d(diag({0.2, 0.8}));
  CHECK(dist(lueders_update(d, basis_projectors(2)), d.entries()) < 1e-12);

  Rng rng(2);
  for (int k = 0; k < 5; ++k) {
    const DensityMatrix rho = random_density(3, 3, rng);
    const MatrixXcd U = random_unitary(3, rng);
    // pinching oracle: the diagonal of U^* rho U, rotated back
    const MatrixXcd inner = U.adjoint() * rho.entries() * U;
    const MatrixXcd expected = U * MatrixXcd(inner.diagonal().asDiagonal()) * U.adjoint();
    CHECK(dist(lueders_update(rho, projectors_from_unitary(U)), expected) < 1e-10);
  }

  MatrixXcd half = MatrixXcd::Zero(2, 2);
  half(0, 0) = 1.0;
  CHECK_THROWS_AS(lueders_update(plus, {half}), ArgumentError);
  CHECK_THROWS_AS(lueders_update(plus, {half, half}), ArgumentError);
}

TEST_CASE("quantum jeffrey update") {
  const DensityMatrix d(diag({0.4, 0.6}));
  CHECK(dist(quantum_jeffrey(d, basis_projectors(2), {0.75, 0.25}), diag({0.75, 0.25})) < 1e-12);
  Rng rng(3);
  const DensityMatrix rho = random_density(3, 3, rng);
  const auto Ps = projectors_from_unitary(random_unitary(3, rng));
  std::vector<double> p;
  for (const MatrixXcd& P : Ps) p.push_back((P * rho.entries() * P).trace().real());
  CHECK(dist(quantum_jeffrey(rho, Ps, p), lueders_update(rho, Ps).entries()) < 1e-10);
  CHECK(dist(quantum_jeffrey(rho, {MatrixXcd::Identity(3, 3)}, {1.0}), rho.entries()) < 1e-12);
  // a block without weight cannot be rescaled
  CHECK_THROWS_AS(quantum_jeffrey(DensityMatrix(diag({1.0, 0.0})), basis_projectors(2), {0.5, 0.5}), DomainError);
  CHECK_THROWS_AS(quantum_jeffrey(d, basis_projectors(2), {0.5, 0.6}), ArgumentError);
}

TEST_CASE("partial trace") {
  VectorXcd bell = VectorXcd::Zero(4);
  bell(0) = bell(3) = 1.0;
  CHECK(dist(partial_trace(pure_state(bell), 2, 2), 0.5 * MatrixXcd::Identity(2, 2)) < 1e-12);
  Rng rng(4);
  const DensityMatrix r1 = random_density(2, 2, rng);
  const DensityMatrix prod(kron(r1.entries(), MatrixXcd::Identity(3, 3) / 3.0));
  CHECK(dist(partial_trace(prod, 2, 3), r1.entries()) < 1e-12);
  CHECK_THROWS_AS(partial_trace(prod, 4, 2), ArgumentError);
}

TEST_CASE("closed forms agree with direct minimisation") {
  Rng rng(5);
  for (int k = 0; k < 4; ++k) {
    const Eigen::Index d = k % 2 == 0 ? 2 : 3;
    const DensityMatrix rho = random_density(d, d, rng);
    const auto Ps = projectors_from_unitary(random_unitary(d, rng));
    const OracleReport l = verify_lueders(rho, Ps, rng.next_seed());
    CHECK(l.gap <= 1e-5);
    CHECK(l.objective_closed <= l.objective_oracle + 1e-8);
    std::vector<double> p(Ps.size(), 1.0 / static_cast<double>(Ps.size()));
    const OracleReport j = verify_jeffrey(rho, Ps, p, rng.next_seed());
    CHECK(j.gap <= 1e-5);
    CHECK_FALSE(j.convergence.empty());
  }
  const OracleReport pt = partial_trace_projection(random_density(4, 3, rng), 2, 2, 6);
  CHECK(pt.gap <= 1e-5);
}

TEST_CASE("kraus maps") {
  CHECK_THROWS_AS(KrausMap({MatrixXcd(diag({1.0, 0.5}))}), ArgumentError);
  CHECK_THROWS_AS(KrausMap(std::vector<MatrixXcd>{}), ArgumentError);
  CHECK_THROWS_AS(KrausMap::depolarizing(2, 1.5), ArgumentError);
  Rng rng(7);
  const DensityMatrix rho = random_density(2, 2, rng);
  CHECK((KrausMap::completely_depolarizing(2).apply(rho.entries()) - 0.5 * MatrixXcd::Identity(2, 2)).norm() < 1e-12);
  const MatrixXcd dep = KrausMap::depolarizing(2, 0.3).apply(rho.entries());
  CHECK((dep - (0.7 * rho.entries() + 0.3 * 0.5 * MatrixXcd::Identity(2, 2))).norm() < 1e-12);
  for (int k = 0; k < 5; ++k) {
    const KrausMap T = sample_cptp(2, 1 + k % 3, rng.next_seed());
    CHECK(T.apply(rho.entries()).trace().real() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(spectral::min_eigenvalue(T.apply(rho.entries())) > -1e-10);
  }
}

TEST_CASE("d_gamma contraction") {
  Rng rng(8);
  const KrausMap U = KrausMap::unitary(random_unitary(2, rng));
  for (double g : {0.25, 0.5, 0.75}) {
    for (int k = 0; k < 10; ++k) {
      const DensityMatrix w = random_density(2, 2, rng), f = random_density(2, 2, rng);
      const double before = d_gamma(w.point(), f.point(), g).value();
      CHECK(d_gamma(U(w.point()), U(f.point()), g).value() == doctest::Approx(before).epsilon(1e-9));
      const KrausMap C = KrausMap::completely_depolarizing(2);
      CHECK(std::abs(d_gamma(C(w.point()), C(f.point()), g).value()) <= 1e-12);
    }
  }
  for (int k = 0; k < 50; ++k) {
    const KrausMap T = sample_cptp(2, 1 + k % 4, rng.next_seed());
    CHECK(cn_check_dgamma(T, 0.5, 5, rng.next_seed()).pass());
    CHECK(dpi_check_d1(T, 5, rng.next_seed()).pass());
  }
  // unitaries sit on the boundary: equality up to roundoff
  const ContractionReport r = cn_check_dgamma(U, 0.5, 10, 9);
  CHECK(r.trials == 10);
  CHECK(r.max_violation <= 1e-8);
  CHECK_THROWS_AS(cn_check_dgamma(U, 1.0, 1, 0), ArgumentError);
}

TEST_CASE("matrix mazur map") {
  CHECK((matrix_mazur(Point(diag({4, 1})), 0.5).mat() - diag({2, 1})).norm() < 1e-12);
  Rng rng(10);
  for (int k = 0; k < 10; ++k) {
    const Point rho = random_density(3, 3, rng).point();
    CHECK(distance(matrix_mazur(rho, 1.0), rho) < 1e-12);
    for (double g : {0.3, 0.5, 2.0})
      CHECK(distance(matrix_mazur_inverse(matrix_mazur(rho, g), g), rho) < 1e-9);
  }
  CHECK_THROWS_AS(matrix_mazur(Point(diag({1, -0.1})), 0.5), ArgumentError);
}
