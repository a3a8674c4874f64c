#include <doctest.h>

#include <cmath>
#include <vector>

#include "bregman/quantum.hpp"
#include "bregman/resources.hpp"

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

// sum p log(p/q) - p + q
double kl(const VectorXd& p, const VectorXd& q) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) s += (p(i) > 0 ? p(i) * std::log(p(i) / q(i)) : 0.0) - p(i) + q(i);
  return s;
}

StateSampler gaussian(Eigen::Index n, double scale = 2.0) {
  return [n, scale](Rng& r) { return Point(VectorXd(scale * r.normal_vector(n))); };
}

StateSampler positive(Eigen::Index n) {
  return [n](Rng& r) { return Point(r.positive_vector(n)); };
}

StateSampler qubit_states() {
  return [](Rng& r) { return quantum::random_density(2, 2, r).point(); };
}

const Ambient a2 = Ambient::vector(2);
const Ambient a3 = Ambient::vector(3);

}  // namespace

TEST_CASE("left and right monotones") {
  const DivergenceSpec eu(Potential::euclidean(2));
  const ResourceTheory ball =
      build_theory_i({}, FreeSet::of(ConstraintSet::norm_ball(a2, 2.0, 1.0)), Divergence::from_spec(eu), eu, gaussian(2));
  CHECK(monotone_left(ball, vec({2, 0}))->value() == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(monotone_left(ball, vec({0.3, 0.4}))->value() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_FALSE(monotone_right(ball, vec({2, 0})).has_value());

  const DivergenceSpec ne(Potential::negative_entropy(2));
  const Point u = vec({0.5, 0.5}), phi = vec({0.75, 0.25});
  ResourceTheory single = build_theory_i({}, FreeSet::finite({u}), Divergence::from_spec(ne), ne, positive(2));
  CHECK(monotone_left(single, phi)->value() == doctest::Approx(kl(u.vec(), phi.vec())).epsilon(1e-12));
  CHECK(monotone_left(single, phi)->value() == doctest::Approx(0.5 * std::log(4.0 / 3.0)).epsilon(1e-12));
  CHECK(monotone_right(single, phi)->value() == doctest::Approx(kl(phi.vec(), u.vec())).epsilon(1e-12));
  CHECK(monotone_left(single, u)->value() == 0.0);

  // right monotone through a dual description: S = exp({u1 = u2}) = the diagonal ray
  const ResourceTheory diag = build_theory_i(
      {}, FreeSet::of(ConstraintSet::whole(a2), ConstraintSet::hyperplane(a2, vec({1, -1}).vec(), 0.0)),
      Divergence::from_spec(ne), ne, positive(2));
  // argmin_t KL(phi, (t, t)) is t = mean(phi)
  const double m = phi.vec().mean();
  CHECK(monotone_right(diag, phi)->value() == doctest::Approx(kl(phi.vec(), VectorXd::Constant(2, m))).epsilon(1e-9));
}

TEST_CASE("type i theories") {
  // the identity alone: tight axiom
  const DivergenceSpec eu(Potential::euclidean(3));
  const ResourceTheory id =
      build_theory_i({}, FreeSet::of(ConstraintSet::norm_ball(a3, 2.0, 1.0)), Divergence::from_spec(eu), eu, gaussian(3));
  REQUIRE(id.operations.size() == 1);
  const TheoryCheck c = validate(id, 100, 1);
  CHECK(c.pass());
  CHECK(c.max_monotone_excess == doctest::Approx(0.0).epsilon(1e-12));

  // depolarizing noise towards I/2 under D_gamma
  CandidateMapSet ops;
  for (double p : {0.1, 0.5, 0.9}) {
    const quantum::KrausMap T = quantum::KrausMap::depolarizing(2, p);
    ops.push_back({"depolarize", [T](const Point& x) { return T(x); }, MapClass::CN});
  }
  const Point mixed(MatrixXcd(0.5 * MatrixXcd::Identity(2, 2)));
  const ResourceTheory q = build_theory_i(ops, FreeSet::finite({mixed}), Divergence::gamma(0.5), std::nullopt,
                                          qubit_states(), 20, 2);
  CHECK(validate(q, 200, 3).pass());
  Rng rng(4);
  for (int k = 0; k < 20; ++k) {
    const Point rho = qubit_states()(rng);
    double prev = std::numeric_limits<double>::infinity();
    for (double p : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const double r = monotone_left(q, quantum::KrausMap::depolarizing(2, p)(rho))->value();
      CHECK(r <= prev + 1e-8);
      prev = r;
    }
    CHECK(prev == doctest::Approx(0.0).epsilon(1e-12));
  }

  // CN but not stable: a translation
  const CandidateMapSet shift = {{"shift", [](const Point& x) { return x + vec({2, 0, 0}); }, MapClass::CN}};
  CHECK_THROWS_AS(build_theory_i(shift, FreeSet::of(ConstraintSet::norm_ball(a3, 2.0, 1.0)), Divergence::from_spec(eu),
                                 eu, gaussian(3)),
                  ConstructionError);
  // not CN
  const CandidateMapSet doubling = {{"double", [](const Point& x) { return 2.0 * x; }, MapClass::CN}};
  try {
    (void)build_theory_i(doubling, FreeSet::finite({vec({0, 0, 0})}), Divergence::from_spec(eu), eu, gaussian(3));
    FAIL("expected a construction error");
  } catch (const ConstructionError& e) {
    CHECK(std::string(e.what()).find("witness") != std::string::npos);
  }
}

TEST_CASE("type ii theories") {
  Rng rng(5);
  const Ambient a4 = Ambient::vector(4);
  const DivergenceSpec eu(Potential::euclidean(4));
  const VectorXd x0 = rng.normal_vector(4);
  const VectorXd r1 = rng.normal_vector(4), r2 = rng.normal_vector(4);
  MatrixXd A2(2, 4);
  A2 << r1.transpose(), r2.transpose();
  const ConstraintSet K1 = ConstraintSet::hyperplane(a4, r1, r1.dot(x0));
  const ConstraintSet K2 = ConstraintSet::affine(a4, A2, A2 * x0);
  const ProjectionOperator P1(Side::Left, eu, K1), P2(Side::Left, eu, K2);
  const CandidateMapSet ops = {{"P1", [P1](const Point& x) { return P1.apply(x); }, MapClass::LSQ},
                               {"P2", [P2](const Point& x) { return P2.apply(x); }, MapClass::LSQ}};
  std::vector<Point> reps;
  for (int i = 0; i < 3; ++i) reps.push_back(P2.apply(Point(VectorXd(rng.normal_vector(4)))));
  const Point only_k1 = P1.apply(Point(VectorXd(3.0 * rng.normal_vector(4))));
  reps.push_back(only_k1);
  const ResourceTheory t = build_theory_ii(ops, reps, Divergence::from_spec(eu), eu, gaussian(4), 20, 6);
  // the common fixed set is the inner set
  REQUIRE(t.free_set.points.size() == 3);
  for (const Point& p : t.free_set.points) CHECK(K2.membership(p, 1e-9));
  CHECK(t.monotones.size() == 3);
  CHECK(validate(t, 100, 7).pass());

  // the LSQ inequality oracle for a single projection
  const Point p0 = t.free_set.points.front();
  for (int k = 0; k < 20; ++k) {
    const Point x(VectorXd(2.0 * rng.normal_vector(4)));
    const double before = 0.5 * std::pow(distance(p0, x), 2), after = 0.5 * std::pow(distance(p0, P1.apply(x)), 2);
    CHECK(after <= before + 1e-12);
    CHECK(t.monotones.front().eval(P1.apply(x)).value() == doctest::Approx(after).epsilon(1e-10));
  }

  // disjoint fixed sets
  const ProjectionOperator Q0(Side::Left, eu, ConstraintSet::hyperplane(a4, VectorXd::Unit(4, 0), 0.0));
  const ProjectionOperator Q1(Side::Left, eu, ConstraintSet::hyperplane(a4, VectorXd::Unit(4, 0), 1.0));
  const CandidateMapSet apart = {{"Q0", [Q0](const Point& x) { return Q0.apply(x); }, MapClass::LSQ},
                                 {"Q1", [Q1](const Point& x) { return Q1.apply(x); }, MapClass::LSQ}};
  CHECK_THROWS_AS(build_theory_ii(apart, {Q0.apply(Point(x0)), Q1.apply(Point(x0))}, Divergence::from_spec(eu), eu,
                                  gaussian(4)),
                  ConstructionError);
  const CandidateMapSet mixed = {{"Q0", apart[0].map, MapClass::LSQ}, {"Q1", apart[1].map, MapClass::RSQ}};
  CHECK_THROWS_AS(build_theory_ii(mixed, {Q0.apply(Point(x0))}, Divergence::from_spec(eu), eu, gaussian(4)),
                  ArgumentError);
}

TEST_CASE("type iii theories") {
  Rng rng(8);
  const DivergenceSpec eu(Potential::euclidean(3));
  const VectorXd k0 = rng.normal_vector(3);
  const ConstraintSet K = ConstraintSet::affine(a3, MatrixXd::Identity(3, 3), k0);
  const VectorXd a = rng.normal_vector(3), b = rng.normal_vector(3);
  const ConstraintSet H1 = ConstraintSet::hyperplane(a3, a, a.dot(k0)), H2 = ConstraintSet::hyperplane(a3, b, b.dot(k0));
  const ResourceTheory t = build_theory_iii(K, {H1, H2}, eu, Side::Left, gaussian(3));
  CHECK(t.kind == TheoryKind::III);
  REQUIRE(t.anchors.size() == 2);
  CHECK(validate(t, 100, 9).pass());
  // monotone 1/2 |x - k|^2 by the metric oracle
  for (int k = 0; k < 20; ++k) {
    const Point x(VectorXd(2.0 * rng.normal_vector(3)));
    const double r = 0.5 * (x.vec() - k0).squaredNorm();
    CHECK(monotone_left(t, x)->value() == doctest::Approx(r).epsilon(1e-10));
    for (const CandidateMap& op : t.operations) CHECK(monotone_left(t, op.map(x))->value() <= r + 1e-10);
  }
  const HomMonoidElement both = compose_diamond(t.anchors[0], t.anchors[1]);
  CHECK(subset_of(K, both.target()).verdict == Verdict::True);

  // the ambient anchor acts as the identity
  const ResourceTheory whole = build_theory_iii(K, {ConstraintSet::whole(a3)}, eu, Side::Left, gaussian(3));
  const Point y = vec({1, -2, 0.5});
  for (const CandidateMap& op : whole.operations) CHECK(distance(op.map(y), y) < 1e-12);

  CHECK_THROWS_AS(build_theory_iii(K, {ConstraintSet::hyperplane(a3, a, a.dot(k0) + 1.0)}, eu, Side::Left, gaussian(3)),
                  ConstructionError);
}

TEST_CASE("approximate free states") {
  // constant maps reach their value from everywhere
  const CandidateMapSet ops = {{"to_a", [](const Point&) { return vec({1, 0}); }, MapClass::Unclassified},
                               {"id", [](const Point& x) { return x; }, MapClass::CN}};
  const std::vector<Point> grid = {vec({0, 0}), vec({1, 1}), vec({2, 3})};
  const std::vector<Point> S = approximate_free_states(ops, grid);
  REQUIRE(S.size() == 1);
  CHECK(distance(S.front(), vec({1, 0})) == 0.0);
  CHECK(approximate_free_states(ops, {}).empty());
}

TEST_CASE("witnesses") {
  std::vector<Point> orthant;
  Rng rng(10);
  for (int k = 0; k < 20; ++k) orthant.emplace_back(rng.positive_vector(3));
  const Point good = vec({0.1, 0, 2}), bad = vec({1, -5, 0});
  const WitnessResult r = witnesses(FreeSet::finite(orthant), {good, bad});
  REQUIRE(r.kept.size() == 1);
  CHECK(distance(r.kept.front(), good) == 0.0);
  REQUIRE(r.dropped.size() == 1);
  CHECK(inner(r.dropped.front().second, bad) < 0.0);
  // against a simplex, the vertex e2 is the offending point
  const WitnessResult s = witnesses(FreeSet::of(ConstraintSet::simplex(3)), {vec({1, -0.1, 1})});
  REQUIRE(s.dropped.size() == 1);
  CHECK(inner(s.dropped.front().second, vec({1, -0.1, 1})) < -1e-9);
  CHECK(witnesses(FreeSet::finite(orthant), {}).kept.empty());
}

TEST_CASE("convex envelopes") {
  Rng rng(11);
  const DivergenceSpec eu(Potential::euclidean(3));
  const VectorXd phi = rng.normal_vector(3);
  std::vector<ResourceTheory> ts;
  std::vector<ProjectionOperator> Ps;
  for (int i = 0; i < 2; ++i) {
    const VectorXd a = rng.normal_vector(3);
    const ProjectionOperator P(Side::Left, eu, ConstraintSet::hyperplane(a3, a, a.dot(phi)));
    Ps.push_back(P);
    ts.push_back(build_theory_ii({{"P", [P](const Point& x) { return P.apply(x); }, MapClass::RSQ}}, {Point(phi)},
                                 Divergence::from_spec(eu), eu, gaussian(3), 20, rng.next_seed()));
  }
  std::vector<Point> samples;
  for (int i = 0; i < 50; ++i) samples.emplace_back(VectorXd(2.0 * rng.normal_vector(3)));

  const EnvelopeReport one = convex_envelope_check({ts[0]}, {1.0}, samples, Point(phi));
  CHECK(one.pass);
  for (double m : one.margins) CHECK(std::abs(m) <= 1e-10);

  const EnvelopeReport two = convex_envelope_check(ts, {0.5, 0.5}, samples, Point(phi));
  CHECK(two.pass);
  REQUIRE(two.margins.size() == samples.size());
  // direct evaluation of the margin
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Point a = Ps[0].apply(samples[i]), b = Ps[1].apply(samples[i]);
    const double rhs = 0.25 * std::pow(distance(a, Point(phi)), 2) + 0.25 * std::pow(distance(b, Point(phi)), 2);
    const double lhs = 0.5 * std::pow(distance(Point(VectorXd(0.5 * (a.vec() + b.vec()))), Point(phi)), 2);
    CHECK(two.margins[i] == doctest::Approx(rhs - lhs).epsilon(1e-9));
  }

  const EnvelopeReport same = convex_envelope_check({ts[0], ts[0]}, {0.3, 0.7}, samples, Point(phi));
  for (double m : same.margins) CHECK(std::abs(m) <= 1e-10);

  CHECK_THROWS_AS(convex_envelope_check(ts, {0.5, 0.6}, samples, Point(phi)), ArgumentError);
  CHECK_THROWS_AS(convex_envelope_check(ts, {1.0, 0.0}, samples, Point(phi)), ArgumentError);
  CHECK_THROWS_AS(convex_envelope_check(ts, {1.0}, samples, Point(phi)), ArgumentError);
}

TEST_CASE("monotone orbits decrease") {
  const DivergenceSpec eu(Potential::euclidean(2));
  const CandidateMapSet ops = {{"halve", [](const Point& x) { return 0.5 * x; }, MapClass::CN}};
  const ResourceTheory t =
      build_theory_i(ops, FreeSet::finite({vec({0, 0})}), Divergence::from_spec(eu), eu, gaussian(2));
  const std::vector<double> orbit = monotone_orbit(t, 0, 0, vec({4, 0}), 3);
  REQUIRE(orbit.size() == 4);
  CHECK(orbit[0] == doctest::Approx(8.0));
  CHECK(orbit[1] == doctest::Approx(2.0));
  CHECK(orbit[3] == doctest::Approx(0.125));
  CHECK_THROWS_AS(monotone_orbit(t, 5, 0, vec({4, 0}), 3), ArgumentError);
}
