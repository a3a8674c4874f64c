#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "bregman/category.hpp"
#include "bregman/random.hpp"

namespace bregman {

/// Free states: a constraint set (projectable) or a finite list.
struct FreeSet {
  std::optional<ConstraintSet> set;   // in embedded coordinates
  std::optional<ConstraintSet> dual;  // grad Psi(l S), enables right monotones
  std::vector<Point> points;

  static FreeSet of(ConstraintSet s, std::optional<ConstraintSet> dual = std::nullopt) {
    return {std::move(s), std::move(dual), {}};
  }
  static FreeSet finite(std::vector<Point> pts) { return {std::nullopt, std::nullopt, std::move(pts)}; }

  bool is_finite() const { return !set && !dual; }
  /// Membership defect: min distance to the finite points, the violation
  /// of `set` at l(x), or of `dual` at grad Psi(l x).
  double defect(const Point& x, const std::optional<DivergenceSpec>& spec) const;
};

struct Monotone {
  std::string name;
  std::function<ExtendedReal(const Point&)> eval;
};

enum class TheoryKind { I, II, III };
std::string to_string(TheoryKind k);

using StateSampler = std::function<Point(Rng&)>;

struct ResourceTheory {
  TheoryKind kind = TheoryKind::I;
  CandidateMapSet operations;
  FreeSet free_set;
  std::vector<Monotone> monotones;
  std::optional<DivergenceSpec> spec;  // needed for projection-based monotones
  Divergence divergence;
  Side side = Side::Left;
  StateSampler sampler;  // fresh states for validation
  std::vector<HomMonoidElement> anchors;  // type (iii)
  bool approximate_free_set = false;
  std::vector<std::string> notes;
};

/// inf_{s in S} D(s, phi): left projection of phi onto a constraint set,
/// or the exact minimum over a finite list.  nullopt = unsupported.
std::optional<ExtendedReal> monotone_left(const ResourceTheory& t, const Point& phi);
/// inf_{s in S} D(phi, s): right projection through the dual description,
/// or the finite minimum.  nullopt = unsupported.
std::optional<ExtendedReal> monotone_right(const ResourceTheory& t, const Point& phi);

struct TheoryCheck {
  std::size_t pairs = 0;
  std::size_t stability_violations = 0;
  std::size_t monotone_violations = 0;
  double max_stability_defect = 0.0;
  double max_monotone_excess = -std::numeric_limits<double>::infinity();  // r(T phi) - r(phi)
  std::optional<Point> witness;
  bool pass() const { return stability_violations == 0 && monotone_violations == 0; }
};

/// Stability and monotone decrease on `pairs` fresh (phi, T) samples;
/// both at tolerance 1e-8.  Also sweeps depth-2 composites T1 o T2.
TheoryCheck validate(const ResourceTheory& t, int pairs, std::uint64_t seed);

/// Type (i): CN operations with a stable free set.  Each op is certified
/// CN on `cert_samples` (ConstructionError with the witness otherwise);
/// the identity is added when missing.
ResourceTheory build_theory_i(CandidateMapSet ops, FreeSet S, Divergence D,
                              std::optional<DivergenceSpec> spec, StateSampler sampler,
                              int cert_samples = 20, std::uint64_t seed = 0);

/// Type (ii): LSQ/RSQ operations with common fixed points.  Representatives
/// not fixed by every op are dropped; none left -> ConstructionError.
/// Monotones D(p, .) for LSQ ops and D(., p) for RSQ ops.
ResourceTheory build_theory_ii(CandidateMapSet ops, std::vector<Point> fixed_candidates,
                               Divergence D, std::optional<DivergenceSpec> spec,
                               StateSampler sampler, int cert_samples = 20,
                               std::uint64_t seed = 0);

/// Type (iii): projections onto anchors Q containing K, composed by the
/// diamond.  For Side::Right, K and the anchors are dual descriptions.
ResourceTheory build_theory_iii(const ConstraintSet& K, const std::vector<ConstraintSet>& anchors,
                                const DivergenceSpec& spec, Side side, StateSampler sampler);

/// Approximate S_T = {phi : for all psi there is T with T psi = phi} on a
/// sample grid: images T(grid[0]) reachable from every grid point (tol).
std::vector<Point> approximate_free_states(const CandidateMapSet& ops,
                                           const std::vector<Point>& grid, double tol = 1e-8);

struct WitnessResult {
  std::vector<Point> kept;
  std::vector<std::pair<Point, Point>> dropped;  // (candidate, offending x)
};

/// Candidates y with <x, y> >= -1e-9 over the finite points of S, or over
/// sampled members (and vertices) of a constraint set.
WitnessResult witnesses(const FreeSet& S, const std::vector<Point>& candidates, int budget = 200,
                        std::uint64_t seed = 0);

struct EnvelopeReport {
  std::vector<double> margins;  // sum w_i D(T_i psi, phi) - D(T psi, phi)
  double min_margin = std::numeric_limits<double>::infinity();
  bool pass = false;
};

/// T = l^{-1}(sum w_i l(T_i psi)) and D(T psi, phi) <= sum w_i D(T_i psi, phi)
/// within 1e-8 on the samples.  Theories share their spec; weights must be
/// positive and sum to 1 (ArgumentError otherwise).  T_i is the first
/// operation of theory i; phi must be fixed by every T_i.
EnvelopeReport convex_envelope_check(const std::vector<ResourceTheory>& theories,
                                     const std::vector<double>& weights,
                                     const std::vector<Point>& samples, const Point& phi);

/// r(T^k phi), k = 0..steps, for the given operation and monotone.
std::vector<double> monotone_orbit(const ResourceTheory& t, std::size_t op, std::size_t monotone,
                                   const Point& phi, int steps);

}  // namespace bregman
