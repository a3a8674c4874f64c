#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bregman/projections.hpp"

namespace bregman {

using Map = std::function<Point(const Point&)>;

// ---------------------------------------------------------------------------
// Hom-monoid of left projections below an anchor Q

/// A left projection L_C together with its anchor Q (C inside Q).
struct HomMonoidElement {
  ProjectionOperator op;
  ConstraintSet anchor;

  /// Checks C inside Q (exact on affine sets, sampled otherwise); throws
  /// ArgumentError with the witness description when it fails.
  static HomMonoidElement make(const DivergenceSpec& spec, const ConstraintSet& target,
                               const ConstraintSet& anchor);
  /// L_Q itself, the zero of the monoid.
  static HomMonoidElement zero(const DivergenceSpec& spec, const ConstraintSet& anchor);

  const ConstraintSet& target() const { return op.target; }
};

/// Target intersect(C1, C2); same spec and same anchor required.
HomMonoidElement compose_diamond(const HomMonoidElement& e1, const HomMonoidElement& e2);

/// e1 <= e2 iff C1 inside C2 (delegates to subset_of).
SubsetResult hom_order(const HomMonoidElement& e1, const HomMonoidElement& e2,
                       int witness_budget = 200);

/// Membership-level equality (both inclusions True).
bool same_target(const HomMonoidElement& e1, const HomMonoidElement& e2);

// ---------------------------------------------------------------------------
// naturality of nested pythagorean decompositions

struct NaturalityReport {
  double outer_residual = 0.0;  // D(f,x) - D(f,P_K x) - D(P_K x, x)
  double inner_residual = 0.0;  // D(f,P_K x) - D(f,P_L P_K x) - D(P_L P_K x, P_K x)
  double tower_gap = 0.0;       // |P_L P_K x - P_L x|
  Point pk, plk;
  bool pass = false;            // both residuals within 1e-7
};

/// phi in L inside K, both affine relative to the potential's domain.
NaturalityReport check_naturality_diagram(const DivergenceSpec& spec, const ConstraintSet& K,
                                          const ConstraintSet& L, const Point& phi,
                                          const Point& x, const SolveConfig& cfg = {});

// ---------------------------------------------------------------------------
// class certification

enum class MapClass { CN, LSQ, RSQ, Unclassified };
std::string to_string(MapClass c);

struct CertificateReport {
  MapClass cls = MapClass::Unclassified;
  bool pass = false;
  double max_violation = 0.0;  // max of lhs - rhs over the sampled pairs
  std::size_t pairs = 0;
  std::optional<std::pair<Point, Point>> witness;
  /// The sequential clause of LSQ/RSQ is only checked on supplied finite
  /// prefixes, so such certificates are partial.
  bool partial = false;
  std::string sequence_note;
};

/// CN: D(Tx, Ty) <= D(x, y) for all sample pairs.
/// LSQ: D(p, Tx) <= D(p, x); RSQ: D(Tx, p) <= D(x, p) for fixed points p.
/// PASS iff the largest violation is at most 1e-8.  Fixed points are
/// checked first (|T p - p| <= 1e-9), ArgumentError otherwise.
CertificateReport certify_class(const Map& T, const std::vector<Point>& samples,
                                const std::vector<Point>& fixed_points, const Divergence& D,
                                MapClass cls,
                                const std::vector<std::vector<Point>>& sequences = {});

/// L_{Fix T}: iterates T from each seed until |Tx - x| <= 1e-10 (at most
/// 1e5 steps), takes the affine hull of the limits in embedded
/// coordinates and checks that T fixes 20 points of it.  Seeds should be
/// generic; dim + 1 of them recover a full-dimensional fixed set.
ProjectionOperator fix_projection_functor(const Map& T, const DivergenceSpec& spec,
                                          const std::vector<Point>& seeds,
                                          std::uint64_t seed = 0);

// ---------------------------------------------------------------------------
// statistical deficiency

/// A finite parametrised model theta -> point on a shared grid.
struct ParametrizedModel {
  std::vector<Eigen::VectorXd> grid;
  std::vector<Point> images;

  /// Throws ConstructionError unless images are pairwise > 1e-9 apart.
  ParametrizedModel(std::vector<Eigen::VectorXd> grid, std::vector<Point> images);
  static ParametrizedModel from_chart(std::vector<Eigen::VectorXd> grid,
                                      const std::function<Point(const Eigen::VectorXd&)>& chart);
  std::size_t size() const { return images.size(); }
};

struct CandidateMap {
  std::string name;
  Map map;
  MapClass cls = MapClass::Unclassified;
};
using CandidateMapSet = std::vector<CandidateMap>;

struct DeficiencyResult {
  ExtendedReal value;
  std::size_t best = 0;                 // first minimiser
  std::vector<ExtendedReal> per_candidate;  // max over the grid per candidate
};

/// delta(M2, M1) = min_T max_theta D(theta_2(theta), T(theta_1(theta))).
DeficiencyResult deficiency(const ParametrizedModel& M1, const ParametrizedModel& M2,
                            const CandidateMapSet& cands, const Divergence& D);
DeficiencyResult deficiency(const ParametrizedModel& M1, const ParametrizedModel& M2,
                            const CandidateMapSet& cands, const DivergenceSpec& spec);

bool epsilon_deficiency(const ParametrizedModel& M1, const ParametrizedModel& M2,
                        const CandidateMapSet& cands, const Divergence& D, ExtendedReal eps);

/// max(delta(M2, M1) over cands12, delta(M1, M2) over cands21).
ExtendedReal mutual_deficiency(const ParametrizedModel& M1, const ParametrizedModel& M2,
                               const CandidateMapSet& cands12, const CandidateMapSet& cands21,
                               const Divergence& D);

struct EquivalenceResult {
  bool equivalent = false;
  std::optional<std::size_t> forward, backward;  // indices into cands12 / cands21
};

/// T1(M1) = M2 and T2(M2) = M1 as point sets (nearest match within tol).
EquivalenceResult equivalence_check(const ParametrizedModel& M1, const ParametrizedModel& M2,
                                    const CandidateMapSet& cands12,
                                    const CandidateMapSet& cands21, double tol = 1e-7);

// ---------------------------------------------------------------------------
// convex closure

/// conv(points), exact membership by a phase-one simplex feasibility solve.
class ConvexHull {
 public:
  explicit ConvexHull(std::vector<Point> points, std::optional<Ambient> ambient = std::nullopt);

  bool is_empty() const { return points_.empty(); }
  const std::vector<Point>& points() const { return points_; }
  /// Convex weights reproducing x, when x is a member (tol on the residual).
  std::optional<Eigen::VectorXd> weights(const Point& x, double tol = 1e-9) const;
  bool membership(const Point& x, double tol = 1e-9) const { return weights(x, tol).has_value(); }
  /// Points that are not convex combinations of the others.
  std::vector<Point> extreme_points() const;

 private:
  std::vector<Point> points_;
  std::optional<Ambient> ambient_;
};

struct MonadLawReport {
  bool unit = false;          // every input point is a member of its hull
  bool multiplication = false;  // co(co P) = co P on probes
  bool idempotence = false;   // co(ext co P) = co P on probes
  std::size_t probes = 0;
  std::size_t mismatches = 0;
  bool pass() const { return unit && multiplication && idempotence; }
};

ConvexHull convex_closure(const std::vector<Point>& points);
MonadLawReport check_monad_laws(const std::vector<Point>& points, int probes = 1000,
                                std::uint64_t seed = 0);

}  // namespace bregman
