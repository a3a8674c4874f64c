#include "bregman/quantum.hpp"

#include <cmath>
#include <limits>

#include "bregman/divergences.hpp"
#include "bregman/errors.hpp"
#include "bregman/optimize.hpp"
#include "bregman/spectral.hpp"

namespace bregman::quantum {

namespace {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::VectorXd;
using cplx = std::complex<double>;

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Columns spanning the range of a projector.
MatrixXcd range_isometry(const MatrixXcd& P) {
  const spectral::Eigensystem es = spectral::eigh(P);
  std::vector<Index> cols;
  for (Index i = 0; i < es.values.size(); ++i)
    if (es.values(i) > 0.5) cols.push_back(i);
  MatrixXcd V(P.rows(), static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) V.col(static_cast<Index>(j)) = es.vectors.col(cols[j]);
  return V;
}

void check_family(const std::vector<MatrixXcd>& Ps, Index d) {
  if (Ps.empty()) throw ArgumentError("projector family is empty");
  MatrixXcd sum = MatrixXcd::Zero(d, d);
  for (std::size_t i = 0; i < Ps.size(); ++i) {
    const MatrixXcd& P = Ps[i];
    if (P.rows() != d || P.cols() != d) throw ArgumentError("projector has the wrong dimension");
    if (spectral::max_asymmetry(P) > 1e-10) throw ArgumentError("projector is not hermitian");
    for (std::size_t j = 0; j < Ps.size(); ++j) {
      const MatrixXcd prod = P * Ps[j];
      const double err = i == j ? (prod - P).cwiseAbs().maxCoeff() : prod.cwiseAbs().maxCoeff();
      if (err > 1e-10)
        throw ArgumentError("projector family is not orthogonal (" + std::to_string(i) + ", " +
                            std::to_string(j) + ")");
    }
    sum += P;
  }
  if ((sum - MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-10)
    throw ArgumentError("projector family does not sum to the identity");
}

/// Lower-triangular r x r factor from r^2 reals.
MatrixXcd factor(const VectorXd& x, Index offset, Index r) {
  MatrixXcd L = MatrixXcd::Zero(r, r);
  Index k = offset;
  for (Index i = 0; i < r; ++i) L(i, i) = x(k++);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < i; ++j) {
      L(i, j) = cplx(x(k), x(k + 1));
      k += 2;
    }
  return L;
}

/// -Re Tr(rho log sigma) + Tr sigma (log clipped at the support threshold).
double cross_term(const MatrixXcd& rho, const MatrixXcd& sigma) {
  const MatrixXcd ls = spectral::log(sigma);
  return -(rho * ls).trace().real() + spectral::trace_re(sigma);
}

double d1(const MatrixXcd& rho, const MatrixXcd& sigma) {
  const spectral::Eigensystem es = spectral::eigh(rho);
  double ent = 0.0;
  for (Index i = 0; i < es.values.size(); ++i) ent += spectral::xlogx(std::max(es.values(i), 0.0));
  return ent - spectral::trace_re(rho) + cross_term(rho, sigma);
}

struct Param {
  std::function<MatrixXcd(const VectorXd&)> state;
  Index size;
};

OracleReport run_oracle(const DensityMatrix& rho, const DensityMatrix& closed, const Param& par,
                        std::uint64_t seed, int restarts) {
  const MatrixXcd& r = rho.entries();
  const optimize::Objective f = [&](const VectorXd& x) { return cross_term(r, par.state(x)); };
  Rng rng(seed);
  optimize::Options opt;
  opt.grad_tol = 1e-10;
  optimize::Result best;
  best.value = kInf;
  for (int k = 0; k < std::max(1, restarts); ++k) {
    // start near a scaled identity factor, perturbed
    VectorXd x0 = 0.3 * rng.normal_vector(par.size);
    optimize::Result res = optimize::bfgs(f, x0, opt);
    if (res.value < best.value) best = std::move(res);
  }
  const MatrixXcd sigma = par.state(best.x);
  OracleReport rep{closed, DensityMatrix(spectral::hermitian_part(sigma), false), 0.0, 0.0, 0.0,
                   best.history};
  rep.gap = (sigma - closed.entries()).norm();
  rep.objective_closed = d1(r, closed.entries());
  rep.objective_oracle = d1(r, sigma);
  return rep;
}

/// Initial factors equal to identity plus noise: shift diagonal params.
Param with_identity_start(Param p, const std::vector<Index>& diag_slots) {
  auto inner = p.state;
  p.state = [inner, diag_slots](const VectorXd& x) {
    VectorXd y = x;
    for (Index s : diag_slots) y(s) += 1.0;
    return inner(y);
  };
  return p;
}

std::vector<Index> diagonal_slots(const std::vector<Index>& sizes) {
  std::vector<Index> out;
  Index off = 0;
  for (Index r : sizes) {
    for (Index i = 0; i < r; ++i) out.push_back(off + i);
    off += r * r;
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

DensityMatrix::DensityMatrix(Eigen::MatrixXcd entries, bool unit_trace)
    : m_(std::move(entries)), unit_(unit_trace) {
  if (m_.rows() != m_.cols() || m_.rows() == 0) throw ArgumentError("density matrix must be square");
  if (spectral::max_asymmetry(m_) > 1e-10) throw ArgumentError("density matrix is not hermitian");
  if (spectral::min_eigenvalue(m_) < -1e-10) throw ArgumentError("density matrix is not PSD");
  if (unit_ && std::abs(trace() - 1.0) > 1e-9)
    throw ArgumentError("density matrix trace differs from 1");
}

DensityMatrix DensityMatrix::from_point(const Point& p, bool unit_trace) {
  if (!p.is_matrix()) throw ArgumentError("density matrix from a vector point");
  return DensityMatrix(p.mat(), unit_trace);
}

double DensityMatrix::trace() const { return spectral::trace_re(m_); }

DensityMatrix random_density(Index d, Index rank, Rng& rng) {
  const MatrixXcd G = rng.ginibre(d, std::max<Index>(1, rank));
  MatrixXcd rho = G * G.adjoint();
  rho /= spectral::trace_re(rho);
  return DensityMatrix(spectral::hermitian_part(rho));
}

DensityMatrix pure_state(const Eigen::VectorXcd& v) {
  const MatrixXcd rho = v * v.adjoint() / v.squaredNorm();
  return DensityMatrix(spectral::hermitian_part(rho));
}

KrausMap::KrausMap(std::vector<MatrixXcd> ops) : ops_(std::move(ops)) {
  if (ops_.empty()) throw ArgumentError("Kraus map without operators");
  const Index din = ops_.front().cols();
  MatrixXcd sum = MatrixXcd::Zero(din, din);
  for (const MatrixXcd& K : ops_) {
    if (K.cols() != din || K.rows() != ops_.front().rows())
      throw ArgumentError("Kraus operators have inconsistent shapes");
    sum += K.adjoint() * K;
  }
  if ((sum - MatrixXcd::Identity(din, din)).cwiseAbs().maxCoeff() > 1e-9)
    throw ArgumentError("Kraus map is not trace preserving");
}

KrausMap KrausMap::unitary(const MatrixXcd& U) { return KrausMap({U}); }

KrausMap KrausMap::completely_depolarizing(Index d) { return depolarizing(d, 1.0); }

KrausMap KrausMap::depolarizing(Index d, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("depolarizing parameter outside [0,1]");
  std::vector<MatrixXcd> ops;
  if (p < 1.0) ops.push_back(std::sqrt(1.0 - p) * MatrixXcd::Identity(d, d));
  if (p > 0.0)
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < d; ++j) {
        MatrixXcd K = MatrixXcd::Zero(d, d);
        K(i, j) = std::sqrt(p / static_cast<double>(d));
        ops.push_back(K);
      }
  return KrausMap(std::move(ops));
}

MatrixXcd KrausMap::apply(const MatrixXcd& rho) const {
  if (rho.rows() != in_dim() || rho.cols() != in_dim())
    throw ArgumentError("Kraus map applied to a state of the wrong dimension");
  MatrixXcd out = MatrixXcd::Zero(out_dim(), out_dim());
  for (const MatrixXcd& K : ops_) out += K * rho * K.adjoint();
  return spectral::hermitian_part(out);
}

DensityMatrix lueders_update(const DensityMatrix& rho, const std::vector<MatrixXcd>& projectors) {
  check_family(projectors, rho.dim());
  MatrixXcd out = MatrixXcd::Zero(rho.dim(), rho.dim());
  for (const MatrixXcd& P : projectors) out += P * rho.entries() * P;
  return DensityMatrix(spectral::hermitian_part(out), rho.unit_trace());
}

DensityMatrix quantum_jeffrey(const DensityMatrix& rho, const std::vector<MatrixXcd>& projectors,
                              const std::vector<double>& probs) {
  check_family(projectors, rho.dim());
  if (probs.size() != projectors.size()) throw ArgumentError("one probability per projector");
  double total = 0.0;
  for (double p : probs) {
    if (!(p > 0.0)) throw ArgumentError("Jeffrey probabilities must be positive");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ArgumentError("Jeffrey probabilities must sum to 1");
  MatrixXcd out = MatrixXcd::Zero(rho.dim(), rho.dim());
  for (std::size_t i = 0; i < projectors.size(); ++i) {
    const MatrixXcd block = projectors[i] * rho.entries() * projectors[i];
    const double w = spectral::trace_re(block);
    if (!(w > spectral::kSupportThreshold))
      throw DomainError("quantum_jeffrey: block " + std::to_string(i) +
                        " has zero weight (D_1 = +inf)");
    out += (probs[i] / w) * block;
  }
  return DensityMatrix(spectral::hermitian_part(out));
}

DensityMatrix partial_trace(const DensityMatrix& rho, Index d1, Index d2) {
  if (d1 < 1 || d2 < 1 || d1 * d2 != rho.dim())
    throw ArgumentError("partial trace: dimension " + std::to_string(rho.dim()) +
                        " does not factor as " + std::to_string(d1) + " x " + std::to_string(d2));
  MatrixXcd out = MatrixXcd::Zero(d1, d1);
  const MatrixXcd& m = rho.entries();
  for (Index a = 0; a < d1; ++a)
    for (Index b = 0; b < d1; ++b)
      for (Index k = 0; k < d2; ++k) out(a, b) += m(a * d2 + k, b * d2 + k);
  return DensityMatrix(spectral::hermitian_part(out), rho.unit_trace());
}

OracleReport verify_lueders(const DensityMatrix& rho, const std::vector<MatrixXcd>& projectors,
                            std::uint64_t seed, int restarts) {
  const DensityMatrix closed = lueders_update(rho, projectors);
  std::vector<MatrixXcd> Vs;
  std::vector<Index> sizes;
  for (const MatrixXcd& P : projectors) {
    Vs.push_back(range_isometry(P));
    sizes.push_back(Vs.back().cols());
  }
  Index n = 0;
  for (Index r : sizes) n += r * r;
  const Index d = rho.dim();
  Param par{[Vs, sizes, d](const VectorXd& x) {
              MatrixXcd s = MatrixXcd::Zero(d, d);
              Index off = 0;
              for (std::size_t i = 0; i < Vs.size(); ++i) {
                const MatrixXcd L = factor(x, off, sizes[i]);
                s += Vs[i] * (L * L.adjoint()) * Vs[i].adjoint();
                off += sizes[i] * sizes[i];
              }
              return s;
            },
            n};
  return run_oracle(rho, closed, with_identity_start(par, diagonal_slots(sizes)), seed, restarts);
}

OracleReport verify_jeffrey(const DensityMatrix& rho, const std::vector<MatrixXcd>& projectors,
                            const std::vector<double>& probs, std::uint64_t seed, int restarts) {
  const DensityMatrix closed = quantum_jeffrey(rho, projectors, probs);
  std::vector<MatrixXcd> Vs;
  std::vector<Index> sizes;
  for (const MatrixXcd& P : projectors) {
    Vs.push_back(range_isometry(P));
    sizes.push_back(Vs.back().cols());
  }
  Index n = 0;
  for (Index r : sizes) n += r * r;
  const Index d = rho.dim();
  Param par{[Vs, sizes, d, probs](const VectorXd& x) {
              MatrixXcd s = MatrixXcd::Zero(d, d);
              Index off = 0;
              for (std::size_t i = 0; i < Vs.size(); ++i) {
                const MatrixXcd L = factor(x, off, sizes[i]);
                const MatrixXcd M = L * L.adjoint();
                const double t = M.trace().real();
                if (!(t > 0.0)) return MatrixXcd(MatrixXcd::Zero(d, d));
                s += (probs[i] / t) * (Vs[i] * M * Vs[i].adjoint());
                off += sizes[i] * sizes[i];
              }
              return s;
            },
            n};
  return run_oracle(rho, closed, with_identity_start(par, diagonal_slots(sizes)), seed, restarts);
}

OracleReport partial_trace_projection(const DensityMatrix& rho, Index d1, Index d2,
                                      std::uint64_t seed, int restarts) {
  const DensityMatrix reduced = partial_trace(rho, d1, d2);
  const MatrixXcd mix = MatrixXcd::Identity(d2, d2) / static_cast<double>(d2);
  // the oracle works on sigma (x) I/d2; compare in the reduced space
  Param par{[d1, mix](const VectorXd& x) {
              const MatrixXcd L = factor(x, 0, d1);
              const MatrixXcd s = L * L.adjoint();
              MatrixXcd out(s.rows() * mix.rows(), s.cols() * mix.cols());
              for (Index i = 0; i < s.rows(); ++i)
                for (Index j = 0; j < s.cols(); ++j)
                  out.block(i * mix.rows(), j * mix.cols(), mix.rows(), mix.cols()) = s(i, j) * mix;
              return out;
            },
            d1 * d1};
  const Param start = with_identity_start(par, diagonal_slots({d1}));
  MatrixXcd closed_big(d1 * d2, d1 * d2);
  for (Index i = 0; i < d1; ++i)
    for (Index j = 0; j < d1; ++j)
      closed_big.block(i * d2, j * d2, d2, d2) = reduced.entries()(i, j) * mix;
  OracleReport big = run_oracle(rho, DensityMatrix(closed_big, false), start, seed, restarts);
  // reduce the oracle minimiser: Tr_2(sigma (x) I/d2) = sigma
  const DensityMatrix oracle_reduced = partial_trace(big.oracle, d1, d2);
  OracleReport rep{reduced, oracle_reduced, (oracle_reduced.entries() - reduced.entries()).norm(),
                   big.objective_closed, big.objective_oracle, big.convergence};
  return rep;
}

KrausMap sample_cptp(Index d, Index rank, std::uint64_t seed) {
  if (d < 1 || rank < 1) throw ArgumentError("sample_cptp: d and rank must be positive");
  Rng rng(seed);
  const MatrixXcd G = rng.ginibre(rank * d, d);
  // V = G (G^* G)^{-1/2}
  const MatrixXcd gram = G.adjoint() * G;
  const MatrixXcd inv_sqrt = spectral::apply(gram, [](double x) { return 1.0 / std::sqrt(x); });
  const MatrixXcd V = G * inv_sqrt;
  std::vector<MatrixXcd> ops;
  for (Index k = 0; k < rank; ++k) ops.push_back(V.block(k * d, 0, d, d));
  return KrausMap(std::move(ops));
}

namespace {

ContractionReport contraction_sweep(const KrausMap& map, int trials, std::uint64_t seed,
                                    const std::function<ExtendedReal(const Point&, const Point&)>& D) {
  ContractionReport rep;
  Rng rng(seed);
  const Index d = map.in_dim();
  for (int k = 0; k < trials; ++k) {
    const DensityMatrix w = random_density(d, rng.uniform_int(1, static_cast<int>(d)), rng);
    const DensityMatrix f = random_density(d, d, rng);
    const ExtendedReal before = D(w.point(), f.point());
    ++rep.trials;
    if (before.is_infinite()) continue;
    const ExtendedReal after = D(map(w.point()), map(f.point()));
    const double v = after.is_finite() ? after.value() - before.value() : kInf;
    if (v > rep.max_violation) rep.max_violation = v;
    if (!(v <= 1e-8)) {
      ++rep.violations;
      if (!rep.witness) rep.witness.emplace(w, f);
    }
  }
  return rep;
}

}  // namespace

ContractionReport cn_check_dgamma(const KrausMap& map, double gamma, int trials, std::uint64_t seed) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ArgumentError("cn_check_dgamma: gamma must lie in ]0,1[");
  if (trials < 0) throw ArgumentError("cn_check_dgamma: negative trial count");
  return contraction_sweep(map, trials, seed,
                           [gamma](const Point& a, const Point& b) { return d_gamma(a, b, gamma); });
}

ContractionReport dpi_check_d1(const KrausMap& map, int trials, std::uint64_t seed) {
  if (trials < 0) throw ArgumentError("dpi_check_d1: negative trial count");
  return contraction_sweep(map, trials, seed,
                           [](const Point& a, const Point& b) { return umegaki_d1(a, b); });
}

Point matrix_mazur(const Point& rho, double gamma) {
  if (!rho.is_matrix()) throw ArgumentError("matrix_mazur: matrix input required");
  if (!(gamma > 0.0)) throw ArgumentError("matrix_mazur: gamma must be positive");
  if (spectral::max_asymmetry(rho.mat()) > 1e-10) throw ArgumentError("matrix_mazur: not hermitian");
  if (spectral::min_eigenvalue(rho.mat()) < -1e-10)
    throw ArgumentError("matrix_mazur: negative eigenvalue");
  const double floor = gamma < 1.0 ? spectral::kSupportThreshold : 0.0;
  return Point(spectral::apply(rho.mat(), [gamma, floor](double x) { return x > floor ? std::pow(x, gamma) : 0.0; }));
}

Point matrix_mazur_inverse(const Point& z, double gamma) {
  if (!(gamma > 0.0)) throw ArgumentError("matrix_mazur_inverse: gamma must be positive");
  return matrix_mazur(z, 1.0 / gamma);
}

std::vector<MatrixXcd> basis_projectors(Index d) {
  std::vector<MatrixXcd> out;
  for (Index i = 0; i < d; ++i) {
    MatrixXcd P = MatrixXcd::Zero(d, d);
    P(i, i) = 1.0;
    out.push_back(P);
  }
  return out;
}

std::vector<MatrixXcd> projectors_from_unitary(const MatrixXcd& U) {
  std::vector<MatrixXcd> out;
  for (Index i = 0; i < U.cols(); ++i) out.push_back(U.col(i) * U.col(i).adjoint());
  return out;
}

MatrixXcd random_unitary(Index d, Rng& rng) {
  const MatrixXcd G = rng.ginibre(d, d);
  Eigen::HouseholderQR<MatrixXcd> qr(G);
  MatrixXcd Q = qr.householderQ();
  const MatrixXcd R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index i = 0; i < d; ++i) {
    const cplx r = R(i, i);
    if (std::abs(r) > 0.0) Q.col(i) *= r / std::abs(r);
  }
  return Q;
}

}  // namespace bregman::quantum
