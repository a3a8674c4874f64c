#pragma once

#include <string>
#include <vector>

#include "bregman/divergences.hpp"
#include "bregman/errors.hpp"
#include "bregman/sets.hpp"

namespace bregman {

enum class Side { Left, Right };

std::string to_string(Side side);

struct SolveConfig {
  int max_cycles = 10000;
  double residual_tol = 1e-9;
  bool trace = false;  // keep iterates and divergences per cycle

  void validate() const;
};

struct CycleRecord {
  int cycle = 0;
  Point iterate;  // only with cfg.trace
  double displacement = 0.0;
  double divergence_to_prev = 0.0;  // D(x^k, x^{k-1}); NaN without cfg.trace
  double feasibility_residual = 0.0;
};

/// Per-cycle history of an iterative solve.  `displacement` is exactly the
/// quantity the stopping rule compared with residual_tol.
struct SolveTrace {
  std::string method;
  std::vector<CycleRecord> records;
  bool converged = false;
};

enum class ProjectionStatus { Ok, Unsupported, Empty };

struct ProjectionResult {
  ProjectionStatus status = ProjectionStatus::Unsupported;
  Point point;
  SolveTrace trace;
  std::string method;

  bool ok() const { return status == ProjectionStatus::Ok; }
};

/// Raised when an iterative solve finds evidence that the target is empty
/// ("possibly empty intersection").  Carries the trace so far.
class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& what, SolveTrace trace)
      : Error(what), trace_(std::move(trace)) {}
  const SolveTrace& trace() const { return trace_; }

 private:
  SolveTrace trace_;
};

/// True when the pythagorean equation holds with equality for left
/// projections onto `set`: affine sets, and sets that agree with their
/// affine hull on the domain (simplices for the entropy, unit-trace PSD
/// constraints for the von Neumann potential).
bool affine_relative_to(const Potential& psi, const ConstraintSet& set);

bool same_spec(const DivergenceSpec& a, const DivergenceSpec& b);

// Targets of left projections are described in embedded coordinates
// z = l(x): the operator is l^{-1} o argmin_{z in C} D_Psi(z, l(y)).

/// Closed-form left projection, or status Unsupported.
///
/// Euclidean: any single primitive, or any affine target.
/// NegativeEntropy: boxes, and any combination of simplices and affine
/// rows (exponential tilting; one-dimensional dual for a single row or a
/// simplex with one row, dual Newton otherwise).
/// SpectralVonNeumann: trace, one expectation, or trace/unit-trace PSD
/// together with one expectation (Gibbs form; H need not commute with y).
ProjectionResult left_project_closed_form(const DivergenceSpec& spec, const ConstraintSet& target,
                                          const Point& y);

/// Bregman-Dykstra over `pieces`, corrections kept in dual coordinates.
/// Each piece is projected by left_project (closed form or inner solve).
/// Throws InfeasibleError when the displacement stagnates away from
/// feasibility, ToleranceError when max_cycles runs out otherwise.
ProjectionResult left_project_dykstra(const DivergenceSpec& spec,
                                      const std::vector<ConstraintSet>& pieces, const Point& y,
                                      const SolveConfig& cfg = {});

/// Plain cyclic Bregman projections onto the rows of A x = b (Kaczmarz for
/// the Euclidean potential).  Inconsistent rows raise InfeasibleError.
ProjectionResult cyclic_bregman_affine(const DivergenceSpec& spec, const AffineSystem& rows,
                                       const Point& y, const SolveConfig& cfg = {});

/// Left projection: closed form when available, else cyclic Bregman
/// (affine targets) or Dykstra over the pieces.  Empty targets give
/// status Empty; y outside the interior raises DomainError.
ProjectionResult left_project(const DivergenceSpec& spec, const ConstraintSet& target,
                              const Point& y, const SolveConfig& cfg = {});

/// Right projection onto K = grad Psi*(M) for the dual description M:
/// l^{-1} grad Psi*( L^{D_Psi*}_M( grad Psi(l y) ) ).
ProjectionResult right_project(const DivergenceSpec& spec, const ConstraintSet& dual_target,
                               const Point& y, const SolveConfig& cfg = {});

/// Left:  D(x, y) - D(x, L y) - D(L y, y)   for x in the target.
/// Right: D(y, x) - D(y, R y) - D(R y, x)   for x in K = grad Psi*(M).
/// ArgumentError when x is not in the target (tolerance 1e-7).
double pythagorean_residual(const DivergenceSpec& spec, const ConstraintSet& target,
                            const Point& x, const Point& y, Side side,
                            const SolveConfig& cfg = {});

/// (side, spec, target) bundle.  For Side::Right the target is the dual
/// description M.
struct ProjectionOperator {
  Side side = Side::Left;
  DivergenceSpec spec;
  ConstraintSet target;

  ProjectionOperator(Side s, DivergenceSpec sp, ConstraintSet t)
      : side(s), spec(std::move(sp)), target(std::move(t)) {}

  ProjectionResult run(const Point& y, const SolveConfig& cfg = {}) const;
  /// Throws DomainError("empty arrow") for empty targets and
  /// ArgumentError for unsupported requests.
  Point apply(const Point& y, const SolveConfig& cfg = {}) const;
  Point operator()(const Point& y) const { return apply(y); }
};

/// L_{Q1} <> L_{Q2} = L_{Q1 n Q2}; both operators must be left operators
/// with the same spec.
ProjectionOperator diamond(const ProjectionOperator& a, const ProjectionOperator& b);

}  // namespace bregman
