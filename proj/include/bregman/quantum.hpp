#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bregman/point.hpp"
#include "bregman/random.hpp"

namespace bregman::quantum {

/// Hermitian PSD matrix; unit trace unless constructed with unit_trace = false.
class DensityMatrix {
 public:
  explicit DensityMatrix(Eigen::MatrixXcd entries, bool unit_trace = true);
  static DensityMatrix from_point(const Point& p, bool unit_trace = true);

  const Eigen::MatrixXcd& entries() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }
  double trace() const;
  bool unit_trace() const { return unit_; }
  Point point() const { return Point(m_); }

 private:
  Eigen::MatrixXcd m_;
  bool unit_ = true;
};

DensityMatrix random_density(Eigen::Index d, Eigen::Index rank, Rng& rng);
/// Pure state |v><v| / <v|v>.
DensityMatrix pure_state(const Eigen::VectorXcd& v);

/// Kraus representation, sum K_i^* K_i = I within 1e-9.
class KrausMap {
 public:
  explicit KrausMap(std::vector<Eigen::MatrixXcd> ops);

  static KrausMap unitary(const Eigen::MatrixXcd& U);
  static KrausMap completely_depolarizing(Eigen::Index d);
  /// (1 - p) rho + p Tr(rho) I / d
  static KrausMap depolarizing(Eigen::Index d, double p);

  const std::vector<Eigen::MatrixXcd>& ops() const { return ops_; }
  Eigen::Index in_dim() const { return ops_.front().cols(); }
  Eigen::Index out_dim() const { return ops_.front().rows(); }
  Eigen::MatrixXcd apply(const Eigen::MatrixXcd& rho) const;
  Point operator()(const Point& p) const { return Point(apply(p.mat())); }

 private:
  std::vector<Eigen::MatrixXcd> ops_;
};

/// sum P_i rho P_i.  ArgumentError unless {P_i} is a complete orthogonal
/// family of hermitian projectors (1e-10).
DensityMatrix lueders_update(const DensityMatrix& rho, const std::vector<Eigen::MatrixXcd>& projectors);

/// sum p_i P_i rho P_i / Tr(P_i rho P_i).  DomainError when a block of rho
/// has zero weight.
DensityMatrix quantum_jeffrey(const DensityMatrix& rho, const std::vector<Eigen::MatrixXcd>& projectors,
                              const std::vector<double>& probs);

/// Tr_2 rho for rho on C^{d1} (x) C^{d2}.
DensityMatrix partial_trace(const DensityMatrix& rho, Eigen::Index d1, Eigen::Index d2);

/// Closed-form update against a direct minimisation of D_1 over an
/// explicit parametrisation of the feasible states.
struct OracleReport {
  DensityMatrix closed_form;
  DensityMatrix oracle;
  double gap = 0.0;                        // Frobenius distance
  double objective_closed = 0.0, objective_oracle = 0.0;  // D_1(rho, .)
  std::vector<double> convergence;         // oracle objective per iteration (best restart)
};

/// Argmin of D_1(rho, sigma) over block-diagonal sigma >= 0.
OracleReport verify_lueders(const DensityMatrix& rho, const std::vector<Eigen::MatrixXcd>& projectors,
                            std::uint64_t seed = 0, int restarts = 10);
/// Argmin of D_1(rho, sigma) over block-diagonal states with Tr(P_i sigma) = p_i.
OracleReport verify_jeffrey(const DensityMatrix& rho, const std::vector<Eigen::MatrixXcd>& projectors,
                            const std::vector<double>& probs, std::uint64_t seed = 0,
                            int restarts = 10);
/// Argmin of D_1(rho, sigma (x) I/d2) over sigma >= 0 against Tr_2 rho.
OracleReport partial_trace_projection(const DensityMatrix& rho, Eigen::Index d1, Eigen::Index d2,
                                      std::uint64_t seed = 0, int restarts = 10);

/// Stinespring-style sample: isometry V = G (G^* G)^{-1/2} from a seeded
/// (rank d) x d Ginibre matrix, cut into `rank` Kraus blocks.
KrausMap sample_cptp(Eigen::Index d, Eigen::Index rank, std::uint64_t seed);

struct ContractionReport {
  std::size_t trials = 0;
  std::size_t violations = 0;
  double max_violation = -std::numeric_limits<double>::infinity();  // D(T w, T f) - D(w, f)
  std::optional<std::pair<DensityMatrix, DensityMatrix>> witness;
  bool pass() const { return violations == 0; }
};

/// D_gamma(T w, T f) <= D_gamma(w, f) + 1e-8 over random state pairs.
ContractionReport cn_check_dgamma(const KrausMap& map, double gamma, int trials, std::uint64_t seed);
/// The same sweep for the Umegaki divergence D_1.
ContractionReport dpi_check_d1(const KrausMap& map, int trials, std::uint64_t seed);

/// rho -> rho^gamma (PSD input; ArgumentError below -1e-10).
Point matrix_mazur(const Point& rho, double gamma);
Point matrix_mazur_inverse(const Point& z, double gamma);

/// Computational-basis rank-one projectors |i><i|.
std::vector<Eigen::MatrixXcd> basis_projectors(Eigen::Index d);
/// Rank-one projectors onto the columns of a unitary.
std::vector<Eigen::MatrixXcd> projectors_from_unitary(const Eigen::MatrixXcd& U);
/// Haar-like random unitary (QR of a Ginibre matrix with phase fix).
Eigen::MatrixXcd random_unitary(Eigen::Index d, Rng& rng);

}  // namespace bregman::quantum
