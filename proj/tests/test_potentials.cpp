#include <doctest.h>

#include <cmath>
#include <vector>

#include "bregman/potentials.hpp"
#include "bregman/random.hpp"
#include "bregman/spectral.hpp"

using namespace bregman;
using Eigen::MatrixXcd;
using Eigen::VectorXd;

namespace {

Point vec2(double a, double b) { return Point(VectorXd((VectorXd(2) << a, b).finished())); }

// central differences in coordinates, independent of the analytic gradient
VectorXd fd_gradient(const Potential& p, const Point& x, double h = 1e-5) {
  const VectorXd c = coords(x);
  VectorXd g(c.size());
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    VectorXd up = c, dn = c;
    up(i) += h;
    dn(i) -= h;
    g(i) = (p.eval(from_coords(up, x.ambient())).value() - p.eval(from_coords(dn, x.ambient())).value()) /
           (2 * h);
  }
  return g;
}

double fenchel_young_gap(const Potential& p, const Point& x, const Point& y) {
  return p.eval(x).value() + p.conjugate_eval(y).value() - inner(x, y);
}

std::vector<Potential> vector_potentials(Eigen::Index n) {
  return {Potential::euclidean(n), Potential::negative_entropy(n), Potential::power_gauge(0.5, n),
          Potential::power_gauge(0.3, n), make_gauge_potential(Gauge::power(1.0, 3.0), 2.0, n),
          Potential::orlicz_gauge(OrliczFunction::power(3.0), Gauge::linear(), n)};
}

Point sample_for(const Potential& p, Rng& rng) {
  if (p.ambient().kind == PointKind::Matrix) {
    const MatrixXcd g = rng.ginibre(p.ambient().dim, p.ambient().dim);
    return Point(MatrixXcd(g * g.adjoint() + 0.1 * MatrixXcd::Identity(p.ambient().dim, p.ambient().dim)));
  }
  if (p.kind() == PotentialKind::NegativeEntropy) return Point(rng.positive_vector(p.ambient().dim));
  return Point(rng.normal_vector(p.ambient().dim));
}

}  // namespace

TEST_CASE("evaluation examples") {
  CHECK(Potential::euclidean(2).eval(vec2(3, 4)).value() == doctest::Approx(12.5));
  CHECK(Potential::negative_entropy(2).eval(vec2(1, 1)).value() == doctest::Approx(-2.0));
  // beta ||x||^{1/beta} at beta = 1/2
  CHECK(Potential::power_gauge(0.5, 2).eval(vec2(3, 4)).value() == doctest::Approx(12.5));
  CHECK(Potential::negative_entropy(2).eval(vec2(-1, 1)).is_infinite());
  CHECK_THROWS_AS((void)Potential::euclidean(3).eval(vec2(1, 1)), ArgumentError);
}

TEST_CASE("von Neumann potential sums over eigenvalues") {
  Rng rng(5);
  const MatrixXcd g = rng.ginibre(3, 3);
  const MatrixXcd rho = g * g.adjoint();
  const auto ev = spectral::eigh(rho).values;
  double expected = 0.0;
  for (double l : ev) expected += l * std::log(l) - l;
  const Potential vn = Potential::spectral_von_neumann(3);
  CHECK(vn.eval(Point(rho)).value() == doctest::Approx(expected).epsilon(1e-12));
  // matrix logarithm as gradient
  const MatrixXcd L = vn.grad(Point(rho)).mat();
  CHECK((spectral::exp(L) - rho).norm() < 1e-10);
}

TEST_CASE("gradient examples") {
  const VectorXd g1 = Potential::euclidean(2).grad(vec2(3, 4)).vec();
  CHECK(g1(0) == doctest::Approx(3.0));
  CHECK(g1(1) == doctest::Approx(4.0));
  const VectorXd g2 = Potential::negative_entropy(2).grad(vec2(1, std::exp(1.0))).vec();
  CHECK(g2(0) == doctest::Approx(0.0));
  CHECK(g2(1) == doctest::Approx(1.0));
  const Potential pg = Potential::power_gauge(0.5, 2);
  const VectorXd g3 = pg.grad(vec2(3, 0)).vec();
  const VectorXd fd = fd_gradient(pg, vec2(3, 0));
  CHECK((g3 - fd).norm() < 1e-6 * fd.norm());
  CHECK(g3(0) == doctest::Approx(3.0));
}

TEST_CASE("gradients off the interior are domain errors naming the violation") {
  const Potential ne = Potential::negative_entropy(3);
  const Point bad(VectorXd((VectorXd(3) << 0.5, 0.0, 0.5).finished()));
  try {
    (void)ne.grad(bad);
    FAIL("expected a domain error");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("coordinate 1") != std::string::npos);
  }
  const Potential vn = Potential::spectral_von_neumann(2);
  MatrixXcd singular = MatrixXcd::Zero(2, 2);
  singular(0, 0) = 1.0;
  CHECK_THROWS_AS((void)vn.grad(Point(singular)), DomainError);
}

TEST_CASE("conjugate examples") {
  const Potential eu = Potential::euclidean(2);
  CHECK(eu.conjugate_eval(vec2(3, 4)).value() == doctest::Approx(12.5));
  CHECK(eu.conjugate_grad(vec2(3, 4)).vec()(1) == doctest::Approx(4.0));
  const Potential ne = Potential::negative_entropy(2);
  CHECK(ne.conjugate_eval(vec2(0, 0)).value() == doctest::Approx(2.0));
  CHECK(ne.conjugate_grad(vec2(0, 0)).vec()(0) == doctest::Approx(1.0));
  const Potential pg = Potential::power_gauge(0.5, 2);
  const Point y = vec2(6, 8);
  CHECK(distance(pg.grad(pg.conjugate_grad(y)), y) < 1e-8);
  // the conjugate of the conjugate is the potential again
  CHECK(same_potential(pg.conjugate().conjugate(), pg));
  CHECK(pg.conjugate().is_conjugate());
}

TEST_CASE("gradient round trip and Fenchel-Young on samples") {
  Rng rng(17);
  std::vector<Potential> ps = vector_potentials(4);
  ps.push_back(Potential::spectral_von_neumann(3));
  ps.push_back(Potential::spectral_power(0.5, 0.5, 2));
  ps.push_back(Potential::power_gauge(0.4, Ambient::matrix(3)));
  for (const Potential& p : ps) {
    CAPTURE(p.name());
    for (int k = 0; k < 100; ++k) {
      const Point x = sample_for(p, rng);
      const Point g = p.grad(x);
      CHECK(distance(p.conjugate_grad(g), x) <= 1e-8 * std::max(1.0, norm(x)));
      const double scale = std::max({1.0, std::abs(p.eval(x).value()), std::abs(inner(x, g))});
      CHECK(std::abs(fenchel_young_gap(p, x, g)) <= 1e-8 * scale);
      // an unrelated dual point leaves a nonnegative gap
      const Point y = p.grad(sample_for(p, rng));
      CHECK(fenchel_young_gap(p, x, y) >= -1e-9 * scale);
    }
  }
}

TEST_CASE("analytic gradients match central differences") {
  Rng rng(23);
  std::vector<Potential> ps = vector_potentials(3);
  ps.push_back(Potential::spectral_von_neumann(2));
  for (const Potential& p : ps) {
    CAPTURE(p.name());
    for (int k = 0; k < 20; ++k) {
      const Point x = sample_for(p, rng);
      const VectorXd g = coords(p.grad(x)), fd = fd_gradient(p, x);
      CHECK((g - fd).norm() <= 1e-6 * std::max(1.0, fd.norm()));
    }
  }
}

TEST_CASE("strict convexity on random chords") {
  Rng rng(29);
  for (const Potential& p : vector_potentials(3)) {
    CAPTURE(p.name());
    for (int k = 0; k < 50; ++k) {
      const Point x = sample_for(p, rng), y = sample_for(p, rng);
      const double t = rng.uniform(0.1, 0.9);
      const double lhs = p.eval(t * x + (1 - t) * y).value();
      const double rhs = t * p.eval(x).value() + (1 - t) * p.eval(y).value();
      CHECK(lhs < rhs);
    }
  }
}

TEST_CASE("gauge potentials") {
  Rng rng(31);
  // phi(t) = t is the euclidean potential
  const Potential lin = make_gauge_potential(Gauge::linear(), 2.0, 3);
  const Potential eu = Potential::euclidean(3);
  for (int k = 0; k < 20; ++k) {
    const Point x(rng.normal_vector(3));
    CHECK(lin.eval(x).value() == doctest::Approx(eu.eval(x).value()).epsilon(1e-10));
  }
  // phi(t) = 2 t^{1/beta - 1} at beta = 1/2 gives ||x||^2
  const Potential sq = make_gauge_potential(Gauge::power(2.0, 1.0), 2.0, 2);
  CHECK(sq.eval(vec2(3, 4)).value() == doctest::Approx(25.0));
  // phi(t) = t^3 without a closed profile: int_0^1 t^3 dt
  const Gauge cubic([](double t) { return t * t * t; });
  CHECK_FALSE(cubic.has_closed_profile());
  const Potential pc = make_gauge_potential(cubic, 2.0, 2);
  CHECK(pc.eval(vec2(1, 0)).value() == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(cubic.inverse(8.0) == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("gauge and potential construction errors") {
  const Gauge flat([](double t) { return std::min(t, 1.0); });
  CHECK_THROWS_AS(flat.validate(), ConstructionError);
  CHECK_THROWS_AS(make_gauge_potential(flat, 2.0, 2), ConstructionError);
  const Gauge shifted([](double t) { return t + 1.0; });
  CHECK_THROWS_AS(shifted.validate(), ConstructionError);
  CHECK_THROWS_AS(make_gauge_potential(Gauge::linear(), 3.0, 2), ConstructionError);
  CHECK_THROWS_AS(Potential::power_gauge(1.5, 2), ConstructionError);
  CHECK_THROWS_AS(Potential::spectral_power(0.0, 0.5, 2), ConstructionError);
}

TEST_CASE("gauge inverse round trip on [0, 1e3]") {
  for (const Gauge& g : {Gauge::power(1.0, 1.0), Gauge::power(0.5, 3.0),
                         Gauge([](double t) { return t + t * t; })}) {
    for (double t = 0.0; t <= 1e3; t += 37.3) CHECK(std::abs(g(g.inverse(t)) - t) <= 1e-10 * std::max(1.0, t));
  }
}

TEST_CASE("adaptedness flags are declared") {
  CHECK(Potential::power_gauge(0.5, 2).flags().rsq_adapted);
  CHECK_FALSE(Potential::power_gauge(0.3, 2).flags().rsq_adapted);
}
