#include <doctest.h>

#include <vector>

#include "bregman/random.hpp"
#include "bregman/sets.hpp"

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

Point diag(std::initializer_list<double> xs) {
  const VectorXd d = vec(xs).vec();
  return Point(MatrixXcd(d.cast<std::complex<double>>().asDiagonal()));
}

bool same_membership(const ConstraintSet& a, const ConstraintSet& b, const std::vector<Point>& probes) {
  for (const Point& p : probes)
    if (a.membership(p, 1e-9) != b.membership(p, 1e-9)) return false;
  return true;
}

// probes near the sets as well as far away, so both answers occur
std::vector<Point> probes_for(const std::vector<ConstraintSet>& sets, int count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Point> out;
  for (const ConstraintSet& s : sets)
    for (const Point& m : sample_members(s, count, rng.next_seed())) out.push_back(m);
  const Eigen::Index n = sets.front().ambient().dim;
  for (int i = 0; i < count; ++i) out.emplace_back(VectorXd(rng.normal_vector(n)));
  return out;
}

}  // namespace

TEST_CASE("membership examples") {
  CHECK(ConstraintSet::simplex(2).membership(vec({0.5, 0.5}), 1e-9));
  CHECK_FALSE(ConstraintSet::simplex(2).membership(vec({0.7, 0.5}), 1e-9));
  CHECK_FALSE(ConstraintSet::halfspace(Ambient::vector(2), vec({1, 0}).vec(), 0.0).membership(vec({1, 0}), 1e-9));
  CHECK(ConstraintSet::spectral_simplex(2).membership(diag({0.7, 0.3}), 1e-9));
  CHECK_FALSE(ConstraintSet::spectral_simplex(2).membership(diag({1.2, -0.2}), 1e-9));
  CHECK(ConstraintSet::box(vec({0, 0}).vec(), vec({1, 1}).vec()).membership(vec({1, 0.5}), 1e-9));
  CHECK(ConstraintSet::norm_ball(Ambient::vector(2), 1.0, 1.0).membership(vec({0.5, -0.5}), 1e-9));
  CHECK_FALSE(ConstraintSet::norm_ball(Ambient::vector(2), 2.0, 1.0).membership(vec({1, 1}), 1e-9));
  MatrixXcd H = MatrixXcd::Zero(2, 2);
  H(0, 0) = 1.0;
  CHECK(ConstraintSet::spectral_expectation(H, 0.7).membership(diag({0.7, 0.3}), 1e-9));
  CHECK(ConstraintSet::spectral_trace(2, 1.0).membership(diag({2.0, -1.0}), 1e-9));
  CHECK(ConstraintSet::whole(Ambient::vector(3)).membership(vec({1e6, -3, 0}), 0.0));
  CHECK_FALSE(ConstraintSet::empty(Ambient::vector(2)).membership(vec({0, 0}), 1.0));
  CHECK_THROWS_AS(ConstraintSet::simplex(2).membership(diag({0.5, 0.5}), 1e-9), ArgumentError);
}

TEST_CASE("affine systems are stored with full row rank") {
  MatrixXd A(3, 3);
  A << 1, 1, 0, 2, 2, 0, 0, 0, 1;
  const ConstraintSet s = ConstraintSet::affine(Ambient::vector(3), A, A * VectorXd::Ones(3));
  REQUIRE(s.affine_piece());
  CHECK(s.affine_piece()->A.rows() == 2);
  CHECK(s.is_affine());
  CHECK(s.membership(vec({2, 0, 1}), 1e-9));
  CHECK_FALSE(s.membership(vec({2, 0, 0}), 1e-9));
  // inconsistent rows: the empty set, not an error
  MatrixXd B(2, 2);
  B << 1, 0, 1, 0;
  CHECK(ConstraintSet::affine(Ambient::vector(2), B, vec({0, 1}).vec()).is_empty());
}

TEST_CASE("is_affine flags equality primitives only") {
  CHECK(ConstraintSet::hyperplane(Ambient::vector(2), vec({1, 1}).vec(), 1.0).is_affine());
  CHECK(ConstraintSet::spectral_trace(2, 1.0).is_affine());
  CHECK_FALSE(ConstraintSet::halfspace(Ambient::vector(2), vec({1, 1}).vec(), 1.0).is_affine());
  CHECK_FALSE(ConstraintSet::simplex(3).is_affine());
  CHECK(ConstraintSet::whole(Ambient::vector(2)).is_affine());
}

TEST_CASE("intersection examples") {
  const Ambient a2 = Ambient::vector(2);
  const ConstraintSet x1 = ConstraintSet::hyperplane(a2, vec({1, 0}).vec(), 0.0);
  const ConstraintSet x2 = ConstraintSet::hyperplane(a2, vec({0, 1}).vec(), 0.0);
  const ConstraintSet both = intersect(x1, x2);
  CHECK(both.membership(vec({0, 0}), 1e-12));
  CHECK_FALSE(both.membership(vec({0, 1e-6}), 1e-9));
  CHECK_FALSE(both.membership(vec({1e-6, 0}), 1e-9));
  CHECK(intersect(x1, ConstraintSet::hyperplane(a2, vec({1, 0}).vec(), 1.0)).is_empty());
  CHECK_THROWS_AS(intersect(x1, ConstraintSet::simplex(3)), ArgumentError);
  // the empty set absorbs
  CHECK(intersect(ConstraintSet::empty(a2), ConstraintSet::simplex(2)).is_empty());
  CHECK(intersect(ConstraintSet::simplex(2), ConstraintSet::empty(a2)).is_empty());
  CHECK(ConstraintSet::empty(a2).violation(vec({0, 0})) == std::numeric_limits<double>::infinity());
}

TEST_CASE("intersection is idempotent, commutative and associative on memberships") {
  Rng rng(3);
  const Ambient a3 = Ambient::vector(3);
  for (int k = 0; k < 10; ++k) {
    const VectorXd x0 = rng.probability_vector(3);
    const ConstraintSet K = ConstraintSet::simplex(3);
    const ConstraintSet H = ConstraintSet::hyperplane(a3, rng.normal_vector(3), 0.0);
    const VectorXd a = rng.normal_vector(3);
    const ConstraintSet S = ConstraintSet::halfspace(a3, a, a.dot(x0) + 0.1);
    const ConstraintSet H2 = ConstraintSet::hyperplane(a3, a, a.dot(x0));
    const std::vector<Point> probes = probes_for({K, S, H2, intersect(K, H2)}, 100, rng.next_seed());
    CHECK(same_membership(intersect(K, K), K, probes));
    CHECK(same_membership(intersect(K, S), intersect(S, K), probes));
    CHECK(same_membership(intersect(intersect(K, S), H2), intersect(K, intersect(S, H2)), probes));
    CHECK(same_membership(intersect(H, H2), intersect(H2, H), probes));
  }
}

TEST_CASE("subset decisions") {
  const Ambient a2 = Ambient::vector(2);
  const ConstraintSet x1 = ConstraintSet::hyperplane(a2, vec({1, 0}).vec(), 0.0);
  const ConstraintSet origin = intersect(x1, ConstraintSet::hyperplane(a2, vec({0, 1}).vec(), 0.0));
  const SubsetResult r = subset_of(origin, x1);
  CHECK(r.verdict == Verdict::True);
  CHECK(r.exact);
  const SubsetResult back = subset_of(x1, origin);
  CHECK(back.verdict == Verdict::False);
  REQUIRE(back.witness);
  CHECK(x1.membership(*back.witness, 1e-9));
  CHECK_FALSE(origin.membership(*back.witness, 1e-9));
  // the simplex does not lie in {x1 <= 0}: the vertex e1 is a witness
  const SubsetResult s = subset_of(ConstraintSet::simplex(2), ConstraintSet::halfspace(a2, vec({1, 0}).vec(), 0.0));
  CHECK(s.verdict == Verdict::False);
  REQUIRE(s.witness);
  CHECK(ConstraintSet::simplex(2).membership(*s.witness, 1e-9));
  // sampled convex sets: true inclusions cannot be proven, so never False
  const SubsetResult u = subset_of(ConstraintSet::simplex(2), ConstraintSet::box(vec({0, 0}).vec(), vec({1, 1}).vec()));
  CHECK(u.verdict != Verdict::False);
}

TEST_CASE("subset is reflexive and transitive on affine sets") {
  Rng rng(5);
  const Ambient a4 = Ambient::vector(4);
  for (int k = 0; k < 10; ++k) {
    const VectorXd x0 = rng.normal_vector(4);
    MatrixXd A(3, 4);
    for (int i = 0; i < 3; ++i) A.row(i) = rng.normal_vector(4).transpose();
    const ConstraintSet s1 = ConstraintSet::affine(a4, A, A * x0);
    const ConstraintSet s2 = ConstraintSet::affine(a4, A.topRows(2), A.topRows(2) * x0);
    const ConstraintSet s3 = ConstraintSet::affine(a4, A.topRows(1), A.topRows(1) * x0);
    CHECK(subset_of(s1, s1).verdict == Verdict::True);
    CHECK(subset_of(s1, s2).verdict == Verdict::True);
    CHECK(subset_of(s2, s3).verdict == Verdict::True);
    CHECK(subset_of(s1, s3).verdict == Verdict::True);
    CHECK(subset_of(s3, s1).verdict == Verdict::False);
  }
}

TEST_CASE("metric projections onto primitives") {
  const Point p = metric_projection(Piece(Simplex{1.0}), vec({2, 0, 0}));
  CHECK(distance(p, vec({1, 0, 0})) < 1e-12);
  const Point b = metric_projection(Piece(Box{vec({0, 0}).vec(), vec({1, 1}).vec()}), vec({2, -1}));
  CHECK(distance(b, vec({1, 0})) < 1e-12);
  const Point h = metric_projection(Piece(Halfspace{vec({1, 1}).vec(), 1.0}), vec({1, 1}));
  CHECK(distance(h, vec({0.5, 0.5})) < 1e-12);
  const Point n = metric_projection(Piece(NormBall{2.0, 1.0}), vec({3, 4}));
  CHECK(distance(n, vec({0.6, 0.8})) < 1e-12);
  const Point n1 = metric_projection(Piece(NormBall{1.0, 1.0}), vec({2, 0}));
  CHECK(distance(n1, vec({1, 0})) < 1e-12);
  const Point ni = metric_projection(Piece(NormBall{std::numeric_limits<double>::infinity(), 1.0}), vec({2, -0.5}));
  CHECK(distance(ni, vec({1, -0.5})) < 1e-12);
  CHECK_THROWS_AS(metric_projection(Piece(NormBall{3.0, 1.0}), vec({3, 4})), ArgumentError);
  const Point sp = metric_projection(Piece(SpectralSimplex{}), diag({1.5, -0.5}));
  CHECK(distance(sp, diag({1, 0})) < 1e-12);
}

TEST_CASE("sampled members belong to the set") {
  const Ambient a3 = Ambient::vector(3);
  const std::vector<ConstraintSet> sets = {
      ConstraintSet::simplex(3),
      intersect(ConstraintSet::simplex(3), ConstraintSet::hyperplane(a3, vec({0, 1, 2}).vec(), 0.8)),
      ConstraintSet::box(vec({-1, 0, 0}).vec(), vec({1, 1, 2}).vec()),
      ConstraintSet::norm_ball(a3, 2.0, 0.5)};
  for (const ConstraintSet& s : sets) {
    const std::vector<Point> m = sample_members(s, 50, 9);
    CHECK(m.size() >= 40);
    for (const Point& x : m) CHECK(s.membership(x, 1e-7));
  }
  // deterministic in the seed
  const auto a = sample_members(sets[1], 5, 1), b = sample_members(sets[1], 5, 1);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(distance(a[i], b[i]) == 0.0);
}

TEST_CASE("pullback sets test membership through a gradient map") {
  const Potential ne = Potential::negative_entropy(2);
  // log-image of the simplex: { y : sum exp y = 1 }
  const PullbackSet dual(ConstraintSet::simplex(2), ne.conjugate());
  CHECK(dual.membership(vec({std::log(0.25), std::log(0.75)}), 1e-9));
  CHECK_FALSE(dual.membership(vec({0, 0}), 1e-9));
}
