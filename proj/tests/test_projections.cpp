#include <doctest.h>

#include <cmath>
#include <vector>

#include "bregman/projections.hpp"
#include "bregman/random.hpp"
#include "bregman/spectral.hpp"

using namespace bregman;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

Point vec(std::initializer_list<double> xs) {
  VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return Point(v);
}

ExtendedReal D(const DivergenceSpec& s, const Point& a, const Point& b) { return embedded_divergence(s, a, b); }

// x_i ∝ y_i exp(lambda f_i) with sum x f = m, lambda by plain bisection
VectorXd tilt_oracle(const VectorXd& y, const VectorXd& f, double m) {
  const auto tilt = [&](double l) {
    VectorXd x = (y.array() * (l * f.array()).exp()).matrix();
    return VectorXd(x / x.sum());
  };
  double lo = -50, hi = 50;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (tilt(mid).dot(f) < m ? lo : hi) = mid;
  }
  return tilt(0.5 * (lo + hi));
}

// y - A^T (A A^T)^{-1} (A y - b)
VectorXd lsq_oracle(const MatrixXd& A, const VectorXd& b, const VectorXd& y) {
  return y - A.transpose() * (A * A.transpose()).ldlt().solve(A * y - b);
}

MatrixXcd diag_m(std::initializer_list<double> xs) {
  return vec(xs).vec().cast<std::complex<double>>().asDiagonal();
}

const Ambient a2 = Ambient::vector(2);
const Ambient a3 = Ambient::vector(3);

}  // namespace

TEST_CASE("closed form examples") {
  const DivergenceSpec eu(Potential::euclidean(2));
  const ProjectionResult h =
      left_project_closed_form(eu, ConstraintSet::hyperplane(a2, vec({1, 1}).vec(), 1.0), vec({0, 0}));
  REQUIRE(h.ok());
  CHECK(distance(h.point, vec({0.5, 0.5})) < 1e-12);

  const DivergenceSpec kl(Potential::negative_entropy(2));
  const ProjectionResult s = left_project_closed_form(kl, ConstraintSet::simplex(2), vec({0.25, 0.25}));
  REQUIRE(s.ok());
  CHECK(distance(s.point, vec({0.5, 0.5})) < 1e-12);

  const ConstraintSet moment =
      intersect(ConstraintSet::simplex(2), ConstraintSet::hyperplane(a2, vec({0, 1}).vec(), 0.25));
  const ProjectionResult t = left_project_closed_form(kl, moment, vec({0.5, 0.5}));
  REQUIRE(t.ok());
  CHECK(distance(t.point, vec({0.75, 0.25})) < 1e-10);
  CHECK(distance(t.point, Point(tilt_oracle(vec({0.5, 0.5}).vec(), vec({0, 1}).vec(), 0.25))) < 1e-10);
}

TEST_CASE("entropy tilting agrees with a bisection oracle") {
  Rng rng(7);
  const DivergenceSpec kl(Potential::negative_entropy(5));
  for (int k = 0; k < 20; ++k) {
    const VectorXd y = rng.positive_vector(5);
    const VectorXd f = rng.normal_vector(5);
    const double m = f.dot(rng.probability_vector(5));
    const ConstraintSet T =
        intersect(ConstraintSet::simplex(5), ConstraintSet::hyperplane(Ambient::vector(5), f, m));
    const ProjectionResult r = left_project(kl, T, Point(y));
    REQUIRE(r.ok());
    CHECK((r.point.vec() - tilt_oracle(y, f, m)).norm() < 1e-9);
  }
}

TEST_CASE("euclidean closed forms match metric projections") {
  Rng rng(8);
  const DivergenceSpec eu(Potential::euclidean(3));
  const std::vector<ConstraintSet> targets = {
      ConstraintSet::box(vec({-1, 0, 0}).vec(), vec({1, 1, 1}).vec()), ConstraintSet::simplex(3),
      ConstraintSet::norm_ball(a3, 2.0, 1.0), ConstraintSet::halfspace(a3, vec({1, -1, 2}).vec(), 0.5)};
  for (const ConstraintSet& T : targets)
    for (int k = 0; k < 10; ++k) {
      const Point y(VectorXd(2.0 * rng.normal_vector(3)));
      const ProjectionResult r = left_project_closed_form(eu, T, y);
      REQUIRE(r.ok());
      CHECK(distance(r.point, metric_projection(T.pieces().front(), y)) < 1e-12);
    }
}

TEST_CASE("von neumann closed forms") {
  Rng rng(9);
  const DivergenceSpec vn(Potential::spectral_von_neumann(3));
  for (int k = 0; k < 10; ++k) {
    const MatrixXcd g = rng.ginibre(3, 3);
    const MatrixXcd y = g * g.adjoint() + 0.1 * MatrixXcd::Identity(3, 3);
    // unit trace: rescaling
    const ProjectionResult r = left_project(vn, ConstraintSet::spectral_trace(3, 1.0), Point(y));
    REQUIRE(r.ok());
    CHECK((r.point.mat() - y / y.trace().real()).norm() < 1e-10);
  }
  // commuting Gibbs state: classical tilt of the eigenvalues
  const MatrixXcd H = diag_m({0, 1, 2});
  const VectorXd ev = vec({0.5, 1.0, 1.5}).vec();
  const ConstraintSet T = intersect(ConstraintSet::spectral_simplex(3), ConstraintSet::spectral_expectation(H, 0.6));
  const ProjectionResult g = left_project(vn, T, Point(MatrixXcd(ev.cast<std::complex<double>>().asDiagonal())));
  REQUIRE(g.ok());
  const VectorXd p = tilt_oracle(ev, vec({0, 1, 2}).vec(), 0.6);
  CHECK((g.point.mat() - MatrixXcd(p.cast<std::complex<double>>().asDiagonal())).norm() < 1e-9);
}

TEST_CASE("dykstra examples") {
  const DivergenceSpec eu(Potential::euclidean(2));
  const std::vector<ConstraintSet> quadrant = {ConstraintSet::halfspace(a2, vec({1, 0}).vec(), 0.0),
                                              ConstraintSet::halfspace(a2, vec({0, 1}).vec(), 0.0)};
  const ProjectionResult q = left_project_dykstra(eu, quadrant, vec({1, 1}));
  REQUIRE(q.ok());
  CHECK(distance(q.point, vec({0, 0})) < 1e-9);

  // a single piece is projected in the first cycle
  const ConstraintSet ball = ConstraintSet::norm_ball(a2, 2.0, 1.0);
  const ProjectionResult one = left_project_dykstra(eu, {ball}, vec({3, 4}));
  REQUIRE(one.ok());
  CHECK(distance(one.point, vec({0.6, 0.8})) < 1e-12);
  REQUIRE_FALSE(one.trace.records.empty());
  CHECK(one.trace.records.size() <= 2);
  CHECK(one.trace.converged);
}

TEST_CASE("dykstra on two affine subspaces matches least squares") {
  Rng rng(10);
  const Ambient a5 = Ambient::vector(5);
  const DivergenceSpec eu(Potential::euclidean(5));
  for (int k = 0; k < 10; ++k) {
    MatrixXd A(3, 5);
    for (int i = 0; i < 3; ++i) A.row(i) = rng.normal_vector(5).transpose();
    const VectorXd x0 = rng.normal_vector(5);
    const VectorXd b = A * x0;
    const ConstraintSet Q1 = ConstraintSet::affine(a5, A.topRows(2), b.head(2));
    const ConstraintSet Q2 = ConstraintSet::affine(a5, A.bottomRows(1), b.tail(1));
    const VectorXd y = rng.normal_vector(5);
    const ProjectionResult r = left_project_dykstra(eu, {Q1, Q2}, Point(y));
    REQUIRE(r.ok());
    CHECK((r.point.vec() - lsq_oracle(A, b, y)).norm() < 1e-6);
  }
}

TEST_CASE("dykstra matches closed forms on entropy intersections") {
  Rng rng(11);
  const Ambient a4 = Ambient::vector(4);
  const DivergenceSpec kl(Potential::negative_entropy(4));
  for (int k = 0; k < 10; ++k) {
    const VectorXd f = rng.normal_vector(4);
    const double m = f.dot(rng.probability_vector(4));
    const ConstraintSet S = ConstraintSet::simplex(4), H = ConstraintSet::hyperplane(a4, f, m);
    const Point y(rng.positive_vector(4));
    const ProjectionResult d = left_project_dykstra(kl, {S, H}, y);
    const ProjectionResult c = left_project_closed_form(kl, intersect(S, H), y);
    REQUIRE(d.ok());
    REQUIRE(c.ok());
    CHECK(distance(d.point, c.point) < 1e-6);
    CHECK(S.membership(d.point, 1e-8));
    CHECK(H.membership(d.point, 1e-8));
  }
}

TEST_CASE("cyclic projections onto affine rows") {
  const DivergenceSpec eu(Potential::euclidean(3));
  MatrixXd A(2, 3);
  A << 1, 0, 0, 0, 1, 0;
  const ProjectionResult r = cyclic_bregman_affine(eu, {A, vec({1, 2}).vec()}, vec({0, 0, 0}));
  REQUIRE(r.ok());
  CHECK(distance(r.point, vec({1, 2, 0})) < 1e-12);

  Rng rng(12);
  for (int k = 0; k < 10; ++k) {
    MatrixXd B(2, 3);
    B.row(0) = rng.normal_vector(3).transpose();
    B.row(1) = B.row(0) + 0.3 * rng.normal_vector(3).transpose();
    const VectorXd b = rng.normal_vector(2), y = rng.normal_vector(3);
    const ProjectionResult c = cyclic_bregman_affine(eu, {B, b}, Point(y));
    REQUIRE(c.ok());
    CHECK((c.point.vec() - lsq_oracle(B, b, y)).norm() < 1e-6);
    const ProjectionResult d =
        left_project_dykstra(eu, {ConstraintSet::hyperplane(a3, B.row(0).transpose(), b(0)),
                                  ConstraintSet::hyperplane(a3, B.row(1).transpose(), b(1))},
                             Point(y));
    CHECK(distance(c.point, d.point) < 1e-6);
  }

  // entropy: simplex row plus one moment row
  const DivergenceSpec kl(Potential::negative_entropy(3));
  MatrixXd M(2, 3);
  M << 1, 1, 1, 0, 1, 2;
  const Point y = vec({0.2, 0.5, 0.9});
  const ProjectionResult e = cyclic_bregman_affine(kl, {M, vec({1, 0.7}).vec()}, y);
  REQUIRE(e.ok());
  CHECK((e.point.vec() - tilt_oracle(y.vec(), vec({0, 1, 2}).vec(), 0.7)).norm() < 1e-6);
}

TEST_CASE("infeasible systems raise errors instead of near-feasible points") {
  const DivergenceSpec eu(Potential::euclidean(2));
  MatrixXd A(2, 2);
  A << 1, 0, 1, 0;
  CHECK_THROWS_AS(cyclic_bregman_affine(eu, {A, vec({0, 1}).vec()}, vec({0, 0})), InfeasibleError);
  const std::vector<ConstraintSet> apart = {ConstraintSet::halfspace(a2, vec({1, 0}).vec(), 0.0),
                                           ConstraintSet::halfspace(a2, vec({-1, 0}).vec(), -1.0)};
  try {
    (void)left_project_dykstra(eu, apart, vec({0.5, 0}));
    FAIL("expected an infeasibility error");
  } catch (const InfeasibleError& e) {
    CHECK_FALSE(e.trace().records.empty());
  }
}

TEST_CASE("cycle budget exhaustion is a tolerance error") {
  const DivergenceSpec eu(Potential::euclidean(2));
  const std::vector<ConstraintSet> pieces = {ConstraintSet::norm_ball(a2, 2.0, 1.0),
                                            ConstraintSet::halfspace(a2, vec({-1, 0.3}).vec(), -0.5)};
  SolveConfig cfg;
  cfg.max_cycles = 1;
  CHECK_THROWS_AS(left_project_dykstra(eu, pieces, vec({-2, 3}), cfg), ToleranceError);
  CHECK(left_project_dykstra(eu, pieces, vec({-2, 3})).ok());
  SolveConfig bad;
  bad.max_cycles = 0;
  CHECK_THROWS_AS(bad.validate(), ArgumentError);
  bad.max_cycles = 1;
  bad.residual_tol = 0.0;
  CHECK_THROWS_AS(bad.validate(), ArgumentError);
}

TEST_CASE("traces record the stopping quantity") {
  const DivergenceSpec eu(Potential::euclidean(2));
  SolveConfig cfg;
  cfg.trace = true;
  const std::vector<ConstraintSet> pieces = {ConstraintSet::norm_ball(a2, 2.0, 1.0),
                                            ConstraintSet::halfspace(a2, vec({-1, 0.3}).vec(), -0.5)};
  const ProjectionResult r = left_project_dykstra(eu, pieces, vec({-2, 3}), cfg);
  REQUIRE(r.trace.records.size() >= 2);
  CHECK(r.trace.records.back().displacement <= cfg.residual_tol);
  for (std::size_t i = 0; i + 1 < r.trace.records.size(); ++i) CHECK(r.trace.records[i].displacement > cfg.residual_tol);
  CHECK(distance(r.trace.records.back().iterate, r.point) < 1e-12);
  CHECK(std::isfinite(r.trace.records.back().divergence_to_prev));
}

TEST_CASE("empty targets and domain errors") {
  const DivergenceSpec kl(Potential::negative_entropy(2));
  const ConstraintSet E = ConstraintSet::empty(a2);
  CHECK(left_project(kl, E, vec({0.5, 0.5})).status == ProjectionStatus::Empty);
  try {
    (void)ProjectionOperator(Side::Left, kl, E).apply(vec({0.5, 0.5}));
    FAIL("expected an empty arrow");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("empty arrow") != std::string::npos);
  }
  CHECK_THROWS_AS(left_project(kl, ConstraintSet::simplex(2), vec({-1, 1})), DomainError);
}

TEST_CASE("idempotence, fixed points and left monotonicity") {
  Rng rng(13);
  const Ambient a4 = Ambient::vector(4);
  struct Case {
    DivergenceSpec spec;
    ConstraintSet target;
    bool positive;
  };
  const VectorXd f = rng.normal_vector(4);
  const std::vector<Case> cases = {
      {DivergenceSpec(Potential::euclidean(4)), ConstraintSet::norm_ball(a4, 2.0, 1.0), false},
      {DivergenceSpec(Potential::euclidean(4)),
       intersect(ConstraintSet::box(VectorXd::Zero(4), VectorXd::Ones(4)), ConstraintSet::halfspace(a4, f, 0.1)), false},
      {DivergenceSpec(Potential::negative_entropy(4)),
       intersect(ConstraintSet::simplex(4), ConstraintSet::hyperplane(a4, f, f.dot(VectorXd::Constant(4, 0.25)))), true},
      {DivergenceSpec(Potential::negative_entropy(4)),
       intersect(ConstraintSet::simplex(4), ConstraintSet::halfspace(a4, f, f.minCoeff() * 0.5 + f.mean() * 0.5)), true},
      {DivergenceSpec(Potential::power_gauge(0.4, 4)), ConstraintSet::hyperplane(a4, f, 1.0), false},
  };
  for (const Case& c : cases) {
    CAPTURE(c.target.describe());
    const ProjectionOperator P(Side::Left, c.spec, c.target);
    const std::vector<Point> members = sample_members(c.target, 10, rng.next_seed());
    REQUIRE_FALSE(members.empty());
    for (int k = 0; k < 10; ++k) {
      const Point y = c.positive ? Point(rng.positive_vector(4)) : Point(VectorXd(2.0 * rng.normal_vector(4)));
      const Point p = P.apply(y);
      CHECK(c.target.membership(p, 1e-8));
      CHECK(distance(P.apply(p), p) <= 1e-7);
      for (const Point& x : members) {
        if (c.positive && x.vec().minCoeff() <= 0.0) continue;
        CHECK(D(c.spec, x, p).value() <= D(c.spec, x, y).value() + 1e-9);
      }
    }
    for (const Point& x : members)
      if (!c.positive || x.vec().minCoeff() > 0.0) CHECK(distance(P.apply(x), x) <= 1e-9);
  }
}

TEST_CASE("pythagorean residuals") {
  Rng rng(14);
  const DivergenceSpec eu(Potential::euclidean(3));
  const ConstraintSet H = ConstraintSet::hyperplane(a3, vec({1, 2, -1}).vec(), 0.5);
  for (int k = 0; k < 20; ++k) {
    const Point x = metric_projection(H, Point(VectorXd(rng.normal_vector(3))));
    const Point y(VectorXd(3.0 * rng.normal_vector(3)));
    CHECK(std::abs(pythagorean_residual(eu, H, x, y, Side::Left)) <= 1e-10);
  }
  const DivergenceSpec kl(Potential::negative_entropy(3));
  const ConstraintSet T =
      intersect(ConstraintSet::simplex(3), ConstraintSet::hyperplane(a3, vec({0, 1, 2}).vec(), 0.8));
  for (int k = 0; k < 10; ++k) {
    const Point x(tilt_oracle(rng.positive_vector(3), vec({0, 1, 2}).vec(), 0.8));
    CHECK(std::abs(pythagorean_residual(kl, T, x, Point(rng.positive_vector(3)), Side::Left)) <= 1e-7);
  }
  const ConstraintSet half = ConstraintSet::halfspace(a3, vec({1, 0, 0}).vec(), 0.0);
  CHECK(pythagorean_residual(eu, half, vec({-1, 2, 0}), vec({3, 1, 1}), Side::Left) >= 0.0);
  CHECK_THROWS_AS(pythagorean_residual(eu, half, vec({1, 0, 0}), vec({3, 1, 1}), Side::Left), ArgumentError);
}

TEST_CASE("euclidean right projections are left projections") {
  Rng rng(15);
  const DivergenceSpec eu(Potential::euclidean(4));
  MatrixXd A(2, 4);
  A.row(0) = rng.normal_vector(4).transpose();
  A.row(1) = rng.normal_vector(4).transpose();
  const ConstraintSet M = ConstraintSet::affine(Ambient::vector(4), A, rng.normal_vector(2));
  for (int k = 0; k < 10; ++k) {
    const Point y(VectorXd(rng.normal_vector(4)));
    const ProjectionResult r = right_project(eu, M, y), l = left_project(eu, M, y);
    REQUIRE(r.ok());
    CHECK(distance(r.point, l.point) < 1e-10);
  }
}

TEST_CASE("entropic right projections satisfy the optimality conditions") {
  // argmin_x KL(y, x) over log x in {A u = b}: log x in M and x - y in the row space
  Rng rng(16);
  const Ambient a4 = Ambient::vector(4);
  const DivergenceSpec kl(Potential::negative_entropy(4));
  for (int k = 0; k < 20; ++k) {
    MatrixXd A(2, 4);
    A.row(0) = rng.normal_vector(4).transpose();
    A.row(1) = rng.normal_vector(4).transpose();
    const VectorXd b = A * (0.5 * rng.normal_vector(4));
    const Point y(rng.positive_vector(4));
    const ProjectionResult r = right_project(kl, ConstraintSet::affine(a4, A, b), y);
    REQUIRE(r.ok());
    const VectorXd x = r.point.vec();
    CHECK((A * x.array().log().matrix() - b).norm() < 1e-9);
    const VectorXd d = x - y.vec();
    CHECK((d - A.transpose() * (A * A.transpose()).ldlt().solve(A * d)).norm() < 1e-9);
    // right pythagorean equation for points of K = exp(M)
    const VectorXd u = A.transpose() * (A * A.transpose()).ldlt().solve(b) +
                       (MatrixXd::Identity(4, 4) - A.transpose() * (A * A.transpose()).ldlt().solve(A)) *
                           rng.normal_vector(4);
    const Point z(VectorXd(u.array().exp().matrix()));
    CHECK(std::abs(pythagorean_residual(kl, ConstraintSet::affine(a4, A, b), z, y, Side::Right)) <= 1e-7);
  }
  // y already in K is fixed
  const ConstraintSet M = ConstraintSet::hyperplane(a4, vec({1, 1, 0, 0}).vec(), 0.0);
  const Point y = vec({2.0, 0.5, 1.3, 0.7});
  CHECK(distance(right_project(kl, M, y).point, y) < 1e-9);
}

TEST_CASE("von neumann right projection onto diagonal states is pinching") {
  Rng rng(17);
  const Ambient m2 = Ambient::matrix(2);
  const DivergenceSpec vn(Potential::spectral_von_neumann(2));
  MatrixXcd re = MatrixXcd::Zero(2, 2), im = MatrixXcd::Zero(2, 2);
  re(0, 1) = re(1, 0) = 1.0;
  im(0, 1) = std::complex<double>(0, 1);
  im(1, 0) = std::complex<double>(0, -1);
  const ConstraintSet M =
      intersect(ConstraintSet::hyperplane(m2, coords(Point(re)), 0.0), ConstraintSet::hyperplane(m2, coords(Point(im)), 0.0));
  for (int k = 0; k < 10; ++k) {
    const MatrixXcd g = rng.ginibre(2, 2);
    const MatrixXcd y = g * g.adjoint() + 0.1 * MatrixXcd::Identity(2, 2);
    const ProjectionResult r = right_project(vn, M, Point(y));
    REQUIRE(r.ok());
    CHECK((r.point.mat() - MatrixXcd(y.diagonal().asDiagonal())).norm() < 1e-6);
  }
}

TEST_CASE("diamond composes left operators by intersection") {
  const DivergenceSpec eu(Potential::euclidean(2));
  const ProjectionOperator a(Side::Left, eu, ConstraintSet::hyperplane(a2, vec({1, 0}).vec(), 0.0));
  const ProjectionOperator b(Side::Left, eu, ConstraintSet::hyperplane(a2, vec({0, 1}).vec(), 0.0));
  CHECK(distance(diamond(a, b).apply(vec({3, 4})), vec({0, 0})) < 1e-12);
  const ProjectionOperator c(Side::Left, DivergenceSpec(Potential::negative_entropy(2)), ConstraintSet::simplex(2));
  CHECK_THROWS_AS(diamond(a, c), ArgumentError);
  CHECK_THROWS_AS(diamond(a, ProjectionOperator(Side::Right, eu, b.target)), ArgumentError);
}
