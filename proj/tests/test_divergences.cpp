#include <doctest.h>

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "bregman/divergences.hpp"
#include "bregman/quantum.hpp"
#include "bregman/random.hpp"
#include "bregman/spectral.hpp"

using namespace bregman;
using Eigen::MatrixXcd;
using Eigen::VectorXd;

namespace {

Point vec2(double a, double b) { return Point(VectorXd((VectorXd(2) << a, b).finished())); }

Point diag(const VectorXd& d) { return Point(MatrixXcd(d.cast<std::complex<double>>().asDiagonal())); }

double kl(const VectorXd& p, const VectorXd& q) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) > 0) s += p(i) * std::log(p(i) / q(i));
    s += q(i) - p(i);
  }
  return s;
}

MatrixXcd random_state(Rng& rng, Eigen::Index d) {
  const MatrixXcd g = rng.ginibre(d, d);
  const MatrixXcd r = g * g.adjoint();
  return r / r.trace().real();
}

}  // namespace

TEST_CASE("bregman divergence examples") {
  CHECK(bregman_divergence(Potential::euclidean(2), vec2(1, 0), vec2(0, 0)).value() == doctest::Approx(0.5));
  const double expected = 0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0);
  const ExtendedReal d = bregman_divergence(Potential::negative_entropy(2), vec2(0.5, 0.5), vec2(0.25, 0.75));
  CHECK(d.value() == doctest::Approx(expected).epsilon(1e-14));
  CHECK(d.value() == doctest::Approx(kl((VectorXd(2) << 0.5, 0.5).finished(), (VectorXd(2) << 0.25, 0.75).finished())));
  // +inf when the second argument leaves int dom
  CHECK(bregman_divergence(Potential::negative_entropy(2), vec2(0.5, 0.5), vec2(1.0, 0.0)).is_infinite());
  CHECK_THROWS_AS(bregman_divergence(Potential::euclidean(2), vec2(1, 0), Point(VectorXd(VectorXd::Zero(3)))),
                  ArgumentError);
}

TEST_CASE("divergences vanish on the diagonal and are nonnegative") {
  Rng rng(7);
  const std::vector<Potential> ps = {Potential::euclidean(4), Potential::negative_entropy(4),
                                     Potential::power_gauge(0.5, 4), Potential::power_gauge(0.25, 4),
                                     Potential::orlicz_gauge(OrliczFunction::cosh_minus_one(), Gauge::linear(), 4)};
  for (const Potential& p : ps) {
    CAPTURE(p.name());
    for (int k = 0; k < 200; ++k) {
      const Point x(p.kind() == PotentialKind::NegativeEntropy ? rng.positive_vector(4) : rng.normal_vector(4));
      const Point y(p.kind() == PotentialKind::NegativeEntropy ? rng.positive_vector(4) : rng.normal_vector(4));
      CHECK(bregman_divergence(p, x, y).value() >= -1e-9);
      CHECK(std::abs(bregman_divergence(p, x, x).value()) <= 1e-9);
    }
  }
  for (int k = 0; k < 200; ++k) {
    const Point a(random_state(rng, 3)), b(random_state(rng, 3));
    CHECK(umegaki_d1(a, b).value() >= -1e-9);
    CHECK(std::abs(umegaki_d1(a, a).value()) <= 1e-9);
    for (double g : {0.25, 0.5, 0.75}) {
      CHECK(d_gamma(a, b, g).value() >= -1e-9);
      CHECK(std::abs(d_gamma(a, a, g).value()) <= 1e-9);
      CHECK(d_gamma_beta(a, b, g, 0.5).value() >= -1e-9);
      CHECK(std::abs(d_gamma_beta(a, a, g, 0.4).value()) <= 1e-9);
    }
  }
}

TEST_CASE("embedded divergence") {
  Rng rng(13);
  const DivergenceSpec id(Potential::negative_entropy(3));
  for (int k = 0; k < 50; ++k) {
    const Point x(rng.positive_vector(3)), y(rng.positive_vector(3));
    CHECK(embedded_divergence(id, x, y) == bregman_divergence(id.potential, x, y));
  }
  const DivergenceSpec mazur(Potential::euclidean(2), EmbeddingMap::mazur_power(0.5));
  CHECK(embedded_divergence(mazur, vec2(0.3, 0.7), vec2(0.3, 0.7)).value() == 0.0);
  // square roots (1,0), (1/2,1/2), then one half the squared distance
  CHECK(embedded_divergence(mazur, vec2(1, 0), vec2(0.25, 0.25)).value() == doctest::Approx(0.25));
}

TEST_CASE("embedding round trips") {
  Rng rng(19);
  const std::vector<EmbeddingMap> maps = {EmbeddingMap::identity(), EmbeddingMap::mazur_power(0.5),
                                          EmbeddingMap::mazur_power(0.3),
                                          EmbeddingMap::orlicz_kaczmarz(OrliczFunction::power(3.0)),
                                          EmbeddingMap::orlicz_kaczmarz(OrliczFunction::exp_minus_one())};
  for (const EmbeddingMap& l : maps) {
    CAPTURE(l.name());
    for (int k = 0; k < 50; ++k) {
      const Point h(rng.normal_vector(4));
      CHECK(distance(l.inverse(l.forward(h)), h) <= 1e-9 * std::max(1.0, norm(h)));
    }
  }
  const EmbeddingMap m = EmbeddingMap::mazur_power(0.5);
  for (int k = 0; k < 20; ++k) {
    const Point rho(random_state(rng, 3));
    const Point z = m.forward(rho);
    CHECK(spectral::min_eigenvalue(z.mat()) >= -1e-12);
    CHECK(distance(m.inverse(z), rho) <= 1e-9);
  }
  CHECK_THROWS_AS(EmbeddingMap::orlicz_kaczmarz(OrliczFunction::power(2.0)).forward(Point(random_state(rng, 2))),
                  ArgumentError);
}

TEST_CASE("umegaki relative entropy") {
  CHECK(umegaki_d1(diag(VectorXd::Constant(2, 0.5)), diag(VectorXd::Constant(2, 0.5))).value() ==
        doctest::Approx(0.0));
  CHECK(umegaki_d1(diag((VectorXd(2) << 1, 0).finished()), diag(VectorXd::Constant(2, 0.5))).value() ==
        doctest::Approx(std::log(2.0)));
  CHECK(umegaki_d1(diag(VectorXd::Constant(2, 0.5)), diag((VectorXd(2) << 1, 0).finished())).is_infinite());
  // diagonal matrices reduce to the classical formula
  Rng rng(37);
  for (int k = 0; k < 50; ++k) {
    const VectorXd p = rng.probability_vector(4), q = rng.probability_vector(4);
    CHECK(umegaki_d1(diag(p), diag(q)).value() == doctest::Approx(kl(p, q)).epsilon(1e-9));
  }
  MatrixXcd skew = MatrixXcd::Identity(2, 2) * 0.5;
  skew(0, 1) = 0.1;
  CHECK_THROWS_AS(umegaki_d1(Point(skew), diag(VectorXd::Constant(2, 0.5))), ArgumentError);
}

TEST_CASE("d_gamma") {
  const Point w = diag((VectorXd(2) << 1, 0).finished()), f = diag(VectorXd::Constant(2, 0.5));
  CHECK(d_gamma(w, f, 0.5).value() == doctest::Approx(4.0 * (1.0 - 1.0 / std::sqrt(2.0))).epsilon(1e-12));
  CHECK(d_gamma(f, w, 0.5).is_infinite());
  CHECK_THROWS_AS(d_gamma(w, f, 1.0), ArgumentError);
  CHECK_THROWS_AS(d_gamma(w, f, 0.0), ArgumentError);
  // commuting pairs: the classical formula on eigenvalues
  Rng rng(41);
  const MatrixXcd U = quantum::random_unitary(3, rng);
  for (int k = 0; k < 50; ++k) {
    const VectorXd a = rng.probability_vector(3), b = rng.probability_vector(3);
    const Point A(MatrixXcd(U * a.cast<std::complex<double>>().asDiagonal() * U.adjoint()));
    const Point B(MatrixXcd(U * b.cast<std::complex<double>>().asDiagonal() * U.adjoint()));
    for (double g : {0.25, 0.5, 0.75}) {
      double s = 0.0;
      for (int i = 0; i < 3; ++i) s += g * a(i) + (1 - g) * b(i) - std::pow(a(i), g) * std::pow(b(i), 1 - g);
      CHECK(d_gamma(A, B, g).value() == doctest::Approx(s / (g * (1 - g))).epsilon(1e-9));
    }
  }
}

TEST_CASE("d_gamma_beta is the pullback divergence") {
  CHECK(d_gamma_beta(vec2(1, 0), vec2(0.25, 0.25), 0.5, 0.5).value() == doctest::Approx(0.25));
  CHECK(d_gamma_beta(vec2(0.3, 0.7), vec2(0.3, 0.7), 0.4, 0.6).value() == doctest::Approx(0.0));
  CHECK(d_gamma_beta(vec2(0.5, 0.5), vec2(1, 0), 0.5, 0.5).is_infinite());
  CHECK_THROWS_AS(d_gamma_beta(vec2(1, 0), vec2(1, 0), 0.5, 1.0), ArgumentError);
  // the printed trace expression is advisory: finite, and not asserted to vanish
  CHECK(d_gamma_beta_printed_form(vec2(0.3, 0.7), vec2(0.3, 0.7), 0.5, 0.5).is_finite());
}

TEST_CASE("luxemburg norm") {
  const VectorXd x = (VectorXd(2) << 3, 4).finished();
  CHECK(luxemburg_norm(OrliczFunction::power(2.0), x) == doctest::Approx(5.0).epsilon(1e-9));
  // e^{1/l} - 1 = 1
  CHECK(luxemburg_norm(OrliczFunction::exp_minus_one(), (VectorXd(2) << 1, 0).finished()) ==
        doctest::Approx(1.0 / std::log(2.0)).epsilon(1e-9));
  CHECK(luxemburg_norm(OrliczFunction::power(3.0), VectorXd::Zero(3)) == 0.0);
}

TEST_CASE("orlicz divergence") {
  Rng rng(43);
  const OrliczFunction sq = OrliczFunction::power(2.0);
  for (int k = 0; k < 30; ++k) {
    const VectorXd w = rng.positive_vector(3), p = rng.positive_vector(3);
    CHECK(std::abs(orlicz_divergence(sq, Gauge::linear(), w, w).value()) <= 1e-9);
    // Phi = t^2, phi = t: square roots, then half the squared distance
    const double oracle = 0.5 * (w.cwiseSqrt() - p.cwiseSqrt()).squaredNorm();
    CHECK(orlicz_divergence(sq, Gauge::linear(), w, p).value() == doctest::Approx(oracle).epsilon(1e-8));
    CHECK(orlicz_divergence(OrliczFunction::exp_minus_one(), Gauge::power(1.0, 2.0), w, p).value() >= -1e-9);
  }
  CHECK(std::isfinite(orlicz_printed_form(sq, 0.5, VectorXd::Constant(2, 0.5), VectorXd::Constant(2, 0.5))));
  OrliczFunction concave{[](double t) { return std::sqrt(std::abs(t)); }, {}, {}, "sqrt"};
  CHECK_THROWS_AS(concave.validate(), ConstructionError);
  OrliczFunction odd{[](double t) { return t * t * t; }, {}, {}, "cube"};
  CHECK_THROWS_AS(odd.validate(), ConstructionError);
}

TEST_CASE("type-erased divergences agree with the direct functions") {
  Rng rng(47);
  const Divergence dg = Divergence::gamma(0.5), du = Divergence::umegaki();
  const Divergence dgb = Divergence::gamma_beta(0.5, 0.5);
  const Divergence dkl = Divergence::from_spec(DivergenceSpec(Potential::negative_entropy(3)));
  for (int k = 0; k < 10; ++k) {
    const Point a(random_state(rng, 2)), b(random_state(rng, 2));
    CHECK(dg(a, b) == d_gamma(a, b, 0.5));
    CHECK(du(a, b) == umegaki_d1(a, b));
    CHECK(dgb(a, b) == d_gamma_beta(a, b, 0.5, 0.5));
    const Point x(rng.positive_vector(3)), y(rng.positive_vector(3));
    CHECK(dkl(x, y).value() == doctest::Approx(kl(x.vec(), y.vec())).epsilon(1e-12));
  }
}
