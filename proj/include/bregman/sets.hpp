#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bregman/point.hpp"
#include "bregman/potentials.hpp"

namespace bregman {

// Primitives.  Linear functionals act on coords(x), so for hermitian
// matrices <a, coords(x)> = Re Tr(A x) with A = from_coords(a).

/// A x = b, full row rank after normalisation.
struct AffineSystem {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
};
/// <a, x> <= c
struct Halfspace {
  Eigen::VectorXd a;
  double c = 0.0;
};
/// lo <= x <= hi componentwise (vectors).
struct Box {
  Eigen::VectorXd lo, hi;
};
/// x >= 0, sum x = total (vectors).
struct Simplex {
  double total = 1.0;
};
/// ||x||_p <= radius; Frobenius norm for matrices (p = 2 only).
struct NormBall {
  double p = 2.0;
  double radius = 1.0;
};
/// Tr x = t.
struct SpectralTrace {
  double t = 1.0;
};
/// Re Tr(H x) = e.
struct SpectralExpectation {
  Eigen::MatrixXcd H;
  double e = 0.0;
};
/// x >= 0 (PSD), Tr x = 1.
struct SpectralSimplex {};

using Piece = std::variant<AffineSystem, Halfspace, Box, Simplex, NormBall, SpectralTrace,
                           SpectralExpectation, SpectralSimplex>;

std::string piece_name(const Piece& piece);
bool is_equality_piece(const Piece& piece);

/// Largest violation of `piece` at x (0 when satisfied).
double piece_violation(const Piece& piece, const Point& x);

/// Euclidean (metric) projection onto a single primitive.
/// NormBall supports p in {1, 2, inf}; throws ArgumentError otherwise.
Point metric_projection(const Piece& piece, const Point& x);

/// Equality rows contributed by a primitive, in coordinates.
/// Simplex and SpectralSimplex contribute their sum/trace row.
AffineSystem equality_rows(const Piece& piece, const Ambient& ambient);

/// Reduces A x = b to independent rows (pivoted QR on A^T, threshold
/// 1e-10).  Returns nullopt when the system is inconsistent.
std::optional<AffineSystem> reduce_affine(const AffineSystem& sys, Eigen::Index coord_dim);

/// Closed convex set: intersection of primitive pieces.
///
/// Equality pieces of type AffineSystem are merged into a single
/// full-row-rank system.  The empty set is a first-class value.
class ConstraintSet {
 public:
  /// The whole ambient space.
  explicit ConstraintSet(const Ambient& ambient) : ambient_(ambient) {}
  ConstraintSet(const Ambient& ambient, std::vector<Piece> pieces);

  static ConstraintSet whole(const Ambient& ambient) { return ConstraintSet(ambient); }
  static ConstraintSet empty(const Ambient& ambient);

  static ConstraintSet affine(const Ambient& ambient, Eigen::MatrixXd A, Eigen::VectorXd b);
  static ConstraintSet hyperplane(const Ambient& ambient, Eigen::VectorXd a, double c);
  static ConstraintSet halfspace(const Ambient& ambient, Eigen::VectorXd a, double c);
  static ConstraintSet box(Eigen::VectorXd lo, Eigen::VectorXd hi);
  static ConstraintSet simplex(Eigen::Index dim, double total = 1.0);
  static ConstraintSet norm_ball(const Ambient& ambient, double p, double radius);
  static ConstraintSet spectral_trace(Eigen::Index side, double t);
  static ConstraintSet spectral_expectation(Eigen::MatrixXcd H, double e);
  static ConstraintSet spectral_simplex(Eigen::Index side);

  const Ambient& ambient() const { return ambient_; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  bool is_empty() const { return empty_; }
  bool is_whole() const { return !empty_ && pieces_.empty(); }
  /// True iff every piece is an equality primitive (the empty set and the
  /// whole space count as affine).
  bool is_affine() const;

  /// All equality information (merged, reduced), including the sum/trace
  /// rows of simplices.  Empty system for the whole space.
  AffineSystem affine_hull_rows() const;
  /// The merged AffineSystem piece only (equality primitives of the
  /// other kinds excluded); nullopt when there is none.
  std::optional<AffineSystem> affine_piece() const;

  bool membership(const Point& x, double tol) const;
  /// max over pieces of piece_violation; +inf for the empty set.
  double violation(const Point& x) const;

  /// The set as a list of single-piece sets (in piece order).
  std::vector<ConstraintSet> split() const;

  std::string describe() const;

 private:
  void normalise();

  Ambient ambient_;
  std::vector<Piece> pieces_;
  bool empty_ = false;
};

/// Piece lists concatenated, affine pieces re-merged; inconsistent
/// equality systems give the empty set.
ConstraintSet intersect(const ConstraintSet& s1, const ConstraintSet& s2);

/// The affine hull of the equality information of s (its
/// affine_hull_rows as a set); the whole space when s has none.
ConstraintSet affine_hull(const ConstraintSet& s);

enum class Verdict { True, False, Unknown };

struct SubsetResult {
  Verdict verdict = Verdict::Unknown;
  std::optional<Point> witness;  // member of s1 outside s2, for False
  bool exact = false;
};

/// s1 subset of s2.  Exact when both are affine; otherwise up to
/// `witness_budget` member samples of s1 are tested against s2.
SubsetResult subset_of(const ConstraintSet& s1, const ConstraintSet& s2, int witness_budget = 200,
                       std::uint64_t seed = 0);

/// Euclidean projection onto the whole set by cyclic Dykstra over the
/// pieces' metric projections.  For sampling and oracles.
Point metric_projection(const ConstraintSet& s, const Point& x, int max_cycles = 5000,
                        double tol = 1e-13);

/// Seeded member points of s (projected gaussian samples plus vertices of
/// simplex/box pieces).  Points failing membership at 1e-10 are dropped.
std::vector<Point> sample_members(const ConstraintSet& s, int count, std::uint64_t seed);

/// Membership through a gradient map: x belongs iff grad(x) is in `base`.
/// With the conjugate potential this is the lazily represented dual
/// image grad Psi(K) = { y : grad Psi*(y) in K }.
class PullbackSet {
 public:
  PullbackSet(ConstraintSet base, Potential map) : base_(std::move(base)), map_(std::move(map)) {}
  const ConstraintSet& base() const { return base_; }
  const Potential& map() const { return map_; }
  bool membership(const Point& x, double tol) const;

 private:
  ConstraintSet base_;
  Potential map_;
};

}  // namespace bregman
