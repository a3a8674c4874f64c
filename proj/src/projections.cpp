#include "bregman/projections.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <limits>
#include <optional>

#include "bregman/numerics.hpp"
#include "bregman/spectral.hpp"

namespace bregman {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kProbationWindow = 100;

bool finite_point(const Point& p) {
  return p.is_vector() ? p.vec().allFinite() : p.mat().allFinite();
}

bool is_separable(const Potential& psi) {
  return psi.ambient().kind == PointKind::Vector &&
         (psi.kind() == PotentialKind::Euclidean || psi.kind() == PotentialKind::NegativeEntropy);
}

bool is_radial(const Potential& psi) {
  const PotentialKind k = psi.kind();
  return k == PotentialKind::Euclidean || k == PotentialKind::PowerGauge ||
         k == PotentialKind::NormGauge || k == PotentialKind::SpectralPower;
}

bool entropy(const Potential& psi) {
  return psi.kind() == PotentialKind::NegativeEntropy && !psi.is_conjugate();
}

bool von_neumann(const Potential& psi) {
  return psi.kind() == PotentialKind::SpectralVonNeumann && !psi.is_conjugate();
}

void require_interior(const Potential& psi, const Point& z) {
  if (!psi.in_interior(z)) (void)psi.grad(z);  // throws DomainError naming the violation
}

double tilt_divergence(const Potential& psi, const Point& a, const Point& b) {
  return bregman_divergence(psi, a, b).value_or(std::numeric_limits<double>::infinity());
}

/// Root of an increasing f with f(0) != 0, searching on the side where
/// the sign changes; `admissible` guards the domain of f.
std::optional<double> solve_from_zero(const std::function<double(double)>& f,
                                      const std::function<bool(double)>& admissible, double f0,
                                      double step) {
  const double s = f0 < 0.0 ? 1.0 : -1.0;
  const auto g = [&](double t) { return s * f(s * t); };
  const auto ok = [&](double t) { return admissible(s * t); };
  double hi = 0.0;
  if (!numerics::expand_bracket(g, ok, 0.0, step, hi)) return std::nullopt;
  return s * numerics::solve_increasing(g, 0.0, hi);
}

/// argmin_{<a, coords x> = c} D_Psi(x, z):  x = grad Psi*(grad Psi z + lambda a).
Point hyperplane_projection(const Potential& psi, const Eigen::VectorXd& a, double c,
                            const Point& z) {
  const double h0 = a.dot(coords(z)) - c;
  if (h0 == 0.0) return z;
  const double aa = a.squaredNorm();
  if (aa == 0.0) throw InfeasibleError("possibly empty intersection: zero row with b != 0", {});
  const Point g = psi.grad(z);
  const Point dir = from_coords(a, z.ambient());
  const auto x_of = [&](double lam) { return psi.conjugate_grad(g + lam * dir); };
  const auto h = [&](double lam) { return a.dot(coords(x_of(lam))) - c; };
  const auto admissible = [&](double lam) {
    const Point d = g + lam * dir;
    if (!finite_point(d) || !psi.in_conjugate_interior(d)) return false;
    return std::isfinite(h(lam));
  };
  const auto lam = solve_from_zero(h, admissible, h0, std::abs(h0) / aa);
  if (!lam) throw InfeasibleError("possibly empty intersection: hyperplane misses the domain", {});
  return x_of(*lam);
}

Point halfspace_projection(const Potential& psi, const Halfspace& hs, const Point& z) {
  if (hs.a.dot(coords(z)) <= hs.c) return z;
  return hyperplane_projection(psi, hs.a, hs.c, z);
}

// --- closed forms ----------------------------------------------------------

/// x = t softmax(log y + lambda a) with mean <a, x>/t = c/t.
Eigen::VectorXd entropy_simplex_row(const Eigen::VectorXd& y, double t, const Eigen::VectorXd& a,
                                    double c) {
  const Eigen::VectorXd ly = y.array().log();
  const auto weights = [&](double lam) {
    Eigen::VectorXd w = ly + lam * a;
    w = (w.array() - w.maxCoeff()).exp();
    return Eigen::VectorXd(w / w.sum());
  };
  const double mu = c / t;
  double amin = std::numeric_limits<double>::infinity(), amax = -amin;
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (y(i) > 0.0) amin = std::min(amin, a(i)), amax = std::max(amax, a(i));
  const double scale = std::max({1.0, std::abs(amin), std::abs(amax)});
  if (amax - amin <= 1e-15 * scale) {
    if (std::abs(mu - amin) > 1e-12 * scale)
      throw InfeasibleError("possibly empty intersection: simplex misses the moment row", {});
    return t * y / y.sum();
  }
  if (mu < amin - 1e-12 * scale || mu > amax + 1e-12 * scale)
    throw InfeasibleError("possibly empty intersection: moment outside the range of f", {});
  if (mu <= amin + 1e-14 * scale || mu >= amax - 1e-14 * scale) {
    // boundary: the tilt degenerates onto the extremal coordinates
    const double ext = mu <= amin + 1e-14 * scale ? amin : amax;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i)
      if (y(i) > 0.0 && std::abs(a(i) - ext) <= 1e-15 * scale) x(i) = y(i);
    return t * x / x.sum();
  }
  const auto m = [&](double lam) { return weights(lam).dot(a) - mu; };
  const double m0 = m(0.0);
  if (m0 == 0.0) return t * weights(0.0);
  const auto lam = solve_from_zero(m, [&](double l) { return std::isfinite(m(l)); }, m0,
                                   1.0 / (amax - amin));
  if (!lam) throw ToleranceError("entropic tilt: no bracket for the dual variable");
  return t * weights(*lam);
}

/// x = y exp(lambda a) with <a, x> = c; zero coordinates of y stay zero.
Eigen::VectorXd entropy_row_tilt(const Eigen::VectorXd& y, const Eigen::VectorXd& a, double c) {
  const auto x_of = [&](double lam) { return Eigen::VectorXd(y.array() * (lam * a.array()).exp()); };
  const auto h = [&](double lam) { return a.dot(x_of(lam)) - c; };
  const double h0 = h(0.0);
  if (h0 == 0.0) return y;
  const double slope = (a.array().square() * y.array()).sum();
  if (slope == 0.0) throw InfeasibleError("possibly empty intersection: hyperplane misses the support", {});
  const auto lam = solve_from_zero(h, [&](double l) { return std::isfinite(h(l)); }, h0,
                                   std::abs(h0) / slope);
  if (!lam) throw InfeasibleError("possibly empty intersection: hyperplane misses the domain", {});
  return x_of(*lam);
}

/// KL projection onto {A x = b} by Newton on the dual
/// f(l) = sum y e^{A^T l} - b^T l.  nullopt when Newton does not converge.
std::optional<Eigen::VectorXd> entropy_dual_newton(const Eigen::VectorXd& y, const AffineSystem& s) {
  const Eigen::MatrixXd& A = s.A;
  const Eigen::VectorXd ly = y.array().log();
  Eigen::VectorXd lam = Eigen::VectorXd::Zero(A.rows());
  const auto primal = [&](const Eigen::VectorXd& l) {
    return Eigen::VectorXd((ly + A.transpose() * l).array().exp());
  };
  const auto dual = [&](const Eigen::VectorXd& l, const Eigen::VectorXd& x) {
    return x.sum() - s.b.dot(l);
  };
  const double scale = std::max(1.0, s.b.lpNorm<Eigen::Infinity>());
  Eigen::VectorXd x = primal(lam);
  double f = dual(lam, x);
  for (int it = 0; it < 200; ++it) {
    const Eigen::VectorXd grad = A * x - s.b;
    if (grad.lpNorm<Eigen::Infinity>() <= 1e-14 * scale) return x;
    const Eigen::MatrixXd H = A * x.asDiagonal() * A.transpose();
    const Eigen::VectorXd d = -H.ldlt().solve(grad);
    if (!d.allFinite()) return std::nullopt;
    double step = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls, step *= 0.5) {
      const Eigen::VectorXd ln = lam + step * d;
      const Eigen::VectorXd xn = primal(ln);
      if (!xn.allFinite()) continue;
      const double fn = dual(ln, xn);
      // below the decrement roundoff f cannot rank steps: take Newton's
      if (fn <= f + 1e-4 * step * grad.dot(d) || -grad.dot(d) <= 1e-13 * std::max(1.0, std::abs(f)) ||
          (fn <= f && step < 1e-8)) {
        lam = ln;
        x = xn;
        f = fn;
        moved = true;
        break;
      }
    }
    if (!moved || step < 1e-8) break;
  }
  if ((A * x - s.b).lpNorm<Eigen::Infinity>() <= 1e-11 * scale) return x;
  return std::nullopt;
}

/// Left projection under Psi*(u) = sum e^u onto {A u = b}: Newton on
/// u = u0 + N t, which has no domain to leave (the row-by-row tilt does).
std::optional<Eigen::VectorXd> exp_affine_newton(const Eigen::VectorXd& z, const AffineSystem& s) {
  const Eigen::VectorXd y = z.array().exp();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(s.A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  svd.setThreshold(1e-12);
  const Eigen::Index r = svd.rank();
  const double scale = std::max(1.0, s.b.lpNorm<Eigen::Infinity>());
  const Eigen::VectorXd u0 = z + svd.solve(Eigen::VectorXd(s.b - s.A * z));
  if ((s.A * u0 - s.b).lpNorm<Eigen::Infinity>() > 1e-9 * scale)
    throw InfeasibleError("possibly empty intersection: inconsistent affine system", {});
  const Eigen::MatrixXd N = svd.matrixV().rightCols(z.size() - r);
  if (N.cols() == 0) return u0;
  const auto F = [&](const Eigen::VectorXd& u) { return u.array().exp().sum() - y.dot(u); };
  Eigen::VectorXd u = u0;
  double f = F(u);
  const double gscale = std::max(1.0, y.lpNorm<Eigen::Infinity>());
  for (int it = 0; it < 200; ++it) {
    const Eigen::VectorXd e = u.array().exp();
    const Eigen::VectorXd g = N.transpose() * (e - y);
    if (g.lpNorm<Eigen::Infinity>() <= 1e-15 * gscale) return u;
    const Eigen::MatrixXd H = N.transpose() * e.asDiagonal() * N;
    const Eigen::VectorXd d = N * Eigen::VectorXd(-H.ldlt().solve(g));
    if (!d.allFinite()) return std::nullopt;
    double step = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls, step *= 0.5) {
      const Eigen::VectorXd un = u + step * d;
      const double fn = F(un);
      if (!std::isfinite(fn)) continue;
      const double dec = -g.dot(N.transpose() * d);
      if (fn <= f + 1e-4 * step * -dec || dec <= 1e-13 * std::max(1.0, std::abs(f)) ||
          (fn <= f && step < 1e-8)) {
        u = un;
        f = fn;
        moved = true;
        break;
      }
    }
    if (!moved || step < 1e-8) break;
  }
  const Eigen::VectorXd g = N.transpose() * (Eigen::VectorXd(u.array().exp()) - y);
  if (g.lpNorm<Eigen::Infinity>() <= 1e-11 * gscale) return u;
  return std::nullopt;
}

/// t exp(log y + lambda H) / Tr(...) with Tr(H x) = e.
Eigen::MatrixXcd gibbs_projection(const Eigen::MatrixXcd& y, double t, const Eigen::MatrixXcd& H,
                                  double e) {
  const Eigen::MatrixXcd L = spectral::log(y);
  const Eigen::MatrixXcd Hh = spectral::hermitian_part(H);
  const auto state = [&](double lam) {
    const spectral::Eigensystem es = spectral::eigh(L + lam * Hh);
    const double top = es.values.maxCoeff();
    Eigen::MatrixXcd rho =
        spectral::reconstruct(es, [top](double v) { return std::exp(v - top); });
    return Eigen::MatrixXcd(rho / spectral::trace_re(rho));
  };
  const auto hev = spectral::eigh(Hh).values;
  const double mu = e / t;
  const double scale = std::max({1.0, std::abs(hev(0)), std::abs(hev(hev.size() - 1))});
  if (hev(hev.size() - 1) - hev(0) <= 1e-15 * scale) {
    if (std::abs(mu - hev(0)) > 1e-12 * scale)
      throw InfeasibleError("possibly empty intersection: expectation out of range", {});
    return t * state(0.0);
  }
  if (mu <= hev(0) + 1e-14 * scale || mu >= hev(hev.size() - 1) - 1e-14 * scale)
    throw InfeasibleError(
        "possibly empty intersection: expectation outside the open spectral range of H", {});
  const auto m = [&](double lam) { return (Hh * state(lam)).trace().real() - mu; };
  const double m0 = m(0.0);
  if (m0 == 0.0) return t * state(0.0);
  const auto lam = solve_from_zero(m, [&](double l) { return std::isfinite(m(l)); }, m0,
                                   1.0 / (hev(hev.size() - 1) - hev(0)));
  if (!lam) throw ToleranceError("gibbs projection: no bracket for the dual variable");
  return t * state(*lam);
}

/// Closed-form left projection in embedded coordinates, or nullopt.
std::optional<Point> closed_form_z(const Potential& psi, const ConstraintSet& set, const Point& z,
                                   std::string& method) {
  const auto& pieces = set.pieces();
  if (pieces.empty()) {
    method = "identity";
    return z;
  }
  const PotentialKind kind = psi.kind();

  if (kind == PotentialKind::Euclidean) {
    if (set.is_affine()) {
      method = "closed_form:euclidean_affine";
      return metric_projection(Piece(set.affine_hull_rows()), z);
    }
    if (pieces.size() == 1) {
      try {
        Point p = metric_projection(pieces[0], z);
        method = "closed_form:euclidean_" + piece_name(pieces[0]);
        return p;
      } catch (const ArgumentError&) {
        return std::nullopt;
      }
    }
    return std::nullopt;
  }

  if (pieces.size() == 1 && std::holds_alternative<Box>(pieces[0]) && is_separable(psi)) {
    const Box& b = std::get<Box>(pieces[0]);
    method = "closed_form:separable_box";
    return Point(Eigen::VectorXd(z.vec().cwiseMax(b.lo).cwiseMin(b.hi)));
  }

  if (pieces.size() == 1 && std::holds_alternative<NormBall>(pieces[0]) && is_radial(psi) &&
      !psi.is_conjugate() && std::get<NormBall>(pieces[0]).p == 2.0) {
    method = "closed_form:radial_ball";
    return metric_projection(pieces[0], z);
  }

  if (entropy(psi)) {
    const bool simplex_affine = std::all_of(pieces.begin(), pieces.end(), [](const Piece& p) {
      return std::holds_alternative<Simplex>(p) || std::holds_alternative<AffineSystem>(p);
    });
    if (!simplex_affine) return std::nullopt;
    const Eigen::VectorXd& y = z.vec();
    if (pieces.size() == 1 && std::holds_alternative<Simplex>(pieces[0])) {
      method = "closed_form:entropy_normalise";
      return Point(Eigen::VectorXd(std::get<Simplex>(pieces[0]).total * y / y.sum()));
    }
    const Simplex* sx = nullptr;
    const AffineSystem* rows = nullptr;
    int n_simplex = 0;
    for (const Piece& p : pieces) {
      if (const auto* s = std::get_if<Simplex>(&p)) sx = s, ++n_simplex;
      if (const auto* a = std::get_if<AffineSystem>(&p)) rows = a;
    }
    if (n_simplex == 0 && rows && rows->A.rows() == 1) {
      method = "closed_form:entropy_tilt";
      return Point(entropy_row_tilt(y, rows->A.row(0).transpose(), rows->b(0)));
    }
    if (n_simplex == 1 && rows && rows->A.rows() == 1) {
      method = "closed_form:entropy_simplex_tilt";
      return Point(entropy_simplex_row(y, sx->total, rows->A.row(0).transpose(), rows->b(0)));
    }
    auto x = entropy_dual_newton(y, set.affine_hull_rows());
    if (!x) return std::nullopt;
    method = "closed_form:entropy_dual_newton";
    return Point(std::move(*x));
  }

  if (kind == PotentialKind::NegativeEntropy && psi.is_conjugate() &&
      std::all_of(pieces.begin(), pieces.end(),
                  [](const Piece& p) { return std::holds_alternative<AffineSystem>(p); })) {
    auto u = exp_affine_newton(z.vec(), set.affine_hull_rows());
    if (!u) return std::nullopt;
    method = "closed_form:exp_affine_newton";
    return Point(std::move(*u));
  }

  if (von_neumann(psi)) {
    std::optional<double> trace;
    const SpectralExpectation* ex = nullptr;
    int n_ex = 0;
    for (const Piece& p : pieces) {
      if (const auto* t = std::get_if<SpectralTrace>(&p)) {
        if (trace && std::abs(*trace - t->t) > 1e-12) return std::nullopt;
        trace = t->t;
      } else if (std::holds_alternative<SpectralSimplex>(p)) {
        if (trace && std::abs(*trace - 1.0) > 1e-12) return std::nullopt;
        trace = 1.0;
      } else if (const auto* e = std::get_if<SpectralExpectation>(&p)) {
        ex = e;
        ++n_ex;
      } else {
        return std::nullopt;
      }
    }
    if (n_ex > 1) return std::nullopt;
    if (trace && *trace <= 0.0)
      throw InfeasibleError("possibly empty intersection: nonpositive trace", {});
    if (!ex) {
      method = "closed_form:von_neumann_trace";
      return (*trace / spectral::trace_re(z.mat())) * z;
    }
    if (!trace) {
      method = "closed_form:von_neumann_tilt";
      return hyperplane_projection(psi, coords(Point(spectral::hermitian_part(ex->H))), ex->e, z);
    }
    method = "closed_form:von_neumann_gibbs";
    return Point(gibbs_projection(z.mat(), *trace, ex->H, ex->e));
  }
  return std::nullopt;
}

// --- decomposition and iterative solvers ------------------------------------

ConstraintSet hyperplane_set(const Ambient& amb, const Eigen::VectorXd& a, double c) {
  return ConstraintSet(amb, {AffineSystem{Eigen::MatrixXd(a.transpose()), Eigen::VectorXd::Constant(1, c)}});
}

bool single_row(const ConstraintSet& s) {
  if (s.pieces().size() != 1) return false;
  const auto* a = std::get_if<AffineSystem>(&s.pieces()[0]);
  return a && a->A.rows() == 1;
}

/// Splits a set into pieces that each admit a per-piece projection.
std::optional<std::vector<ConstraintSet>> decompose(const Potential& psi, const ConstraintSet& set,
                                                    const Point& probe) {
  const Ambient& amb = set.ambient();
  const Eigen::Index cd = amb.coordinate_dim();
  std::vector<ConstraintSet> out;
  for (const ConstraintSet& piece_set : set.split()) {
    const Piece& p = piece_set.pieces()[0];
    std::string m;
    bool closed = false;
    try {
      closed = closed_form_z(psi, piece_set, probe, m).has_value();
    } catch (const Error&) {
      closed = false;
    }
    if (closed) {
      out.push_back(piece_set);
      continue;
    }
    if (const auto* s = std::get_if<AffineSystem>(&p)) {
      for (Eigen::Index i = 0; i < s->A.rows(); ++i)
        out.push_back(hyperplane_set(amb, s->A.row(i).transpose(), s->b(i)));
    } else if (std::holds_alternative<Halfspace>(p)) {
      out.push_back(piece_set);
    } else if (const auto* sx = std::get_if<Simplex>(&p)) {
      out.push_back(hyperplane_set(amb, Eigen::VectorXd::Ones(cd), sx->total));
      for (Eigen::Index i = 0; i < cd; ++i)
        out.push_back(ConstraintSet::halfspace(amb, -Eigen::VectorXd::Unit(cd, i), 0.0));
    } else if (const auto* b = std::get_if<Box>(&p)) {
      for (Eigen::Index i = 0; i < cd; ++i) {
        out.push_back(ConstraintSet::halfspace(amb, Eigen::VectorXd::Unit(cd, i), b->hi(i)));
        out.push_back(ConstraintSet::halfspace(amb, -Eigen::VectorXd::Unit(cd, i), -b->lo(i)));
      }
    } else if (const auto* t = std::get_if<SpectralTrace>(&p)) {
      out.push_back(hyperplane_set(amb, coords(Point(Eigen::MatrixXcd(
                                             Eigen::MatrixXcd::Identity(amb.dim, amb.dim)))),
                                   t->t));
    } else if (const auto* e = std::get_if<SpectralExpectation>(&p)) {
      out.push_back(hyperplane_set(amb, coords(Point(spectral::hermitian_part(e->H))), e->e));
    } else {
      return std::nullopt;
    }
  }
  return out;
}

struct ZResult {
  ProjectionStatus status = ProjectionStatus::Unsupported;
  Point point;
  SolveTrace trace;
  std::string method;
};

ZResult left_project_z(const Potential& psi, const ConstraintSet& set, const Point& z,
                       const SolveConfig& cfg);

SolveConfig inner_config(const SolveConfig& cfg) {
  SolveConfig c = cfg;
  c.residual_tol = std::max(1e-14, 1e-2 * cfg.residual_tol);
  c.trace = false;
  return c;
}

Point project_piece_z(const Potential& psi, const ConstraintSet& piece, const Point& z,
                      const SolveConfig& cfg) {
  if (single_row(piece)) {
    const auto& s = std::get<AffineSystem>(piece.pieces()[0]);
    return hyperplane_projection(psi, s.A.row(0).transpose(), s.b(0), z);
  }
  if (piece.pieces().size() == 1 && std::holds_alternative<Halfspace>(piece.pieces()[0])) {
    std::string m;
    if (auto p = closed_form_z(psi, piece, z, m)) return *p;
    return halfspace_projection(psi, std::get<Halfspace>(piece.pieces()[0]), z);
  }
  ZResult r = left_project_z(psi, piece, z, cfg);
  if (r.status == ProjectionStatus::Empty)
    throw InfeasibleError("possibly empty intersection: empty piece", {});
  if (r.status != ProjectionStatus::Ok)
    throw ArgumentError("no per-piece projection for " + piece.describe());
  return r.point;
}

void push_record(SolveTrace& tr, const SolveConfig& cfg, const Potential& psi, int cycle,
                 const Point& x, const Point& prev, double disp, double feas) {
  CycleRecord rec;
  rec.cycle = cycle;
  rec.displacement = disp;
  rec.feasibility_residual = feas;
  rec.divergence_to_prev = kNaN;
  if (cfg.trace) {
    rec.iterate = x;
    rec.divergence_to_prev = tilt_divergence(psi, x, prev);
  }
  tr.records.push_back(std::move(rec));
}

bool stagnating(const SolveTrace& tr) {
  const auto n = static_cast<int>(tr.records.size());
  if (n < 2 * kProbationWindow) return false;
  const double now = tr.records[n - 1].displacement;
  const double before = tr.records[n - 1 - kProbationWindow].displacement;
  return now >= (1.0 - 1e-3) * before;
}

// Plain cyclic projections (no corrections) from x.  For a nonempty
// intersection the feasibility residual goes to zero; for an empty one it
// stays bounded away from zero.  Returns the smallest residual seen.
double cyclic_probe(const Potential& psi, const std::vector<ConstraintSet>& pieces,
                    const ConstraintSet& full, Point x, const SolveConfig& inner, int cycles) {
  double best = full.violation(x);
  for (int k = 0; k < cycles && best > 1e-10; ++k) {
    for (const auto& p : pieces) x = project_piece_z(psi, p, x, inner);
    if (!finite_point(x)) break;
    best = std::min(best, full.violation(x));
  }
  return best;
}

ZResult dykstra_z(const Potential& psi, const std::vector<ConstraintSet>& pieces,
                  const ConstraintSet& full, const Point& z, const SolveConfig& cfg) {
  ZResult res;
  res.trace.method = "dykstra";
  const SolveConfig inner = inner_config(cfg);
  const std::size_t m = pieces.size();
  Point x = z;
  std::vector<Point> q(m, zero_like(psi.grad(z)));
  std::vector<Point> last(m, z);
  bool known_feasible = false;
  for (int k = 1; k <= cfg.max_cycles; ++k) {
    const Point start = x;
    double disp = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const Point g = psi.grad(x);
      const Point u = psi.conjugate_grad(g + q[i]);
      Point xn = project_piece_z(psi, pieces[i], u, inner);
      if (!finite_point(xn))
        throw InfeasibleError("possibly empty intersection: iterates diverged", res.trace);
      Point qn = g + q[i] - psi.grad(xn);
      // Outputs can sit still at a vertex while a correction drifts, so
      // both count towards the displacement.
      disp = std::max({disp, distance(xn, last[i]), distance(qn, q[i])});
      q[i] = std::move(qn);
      last[i] = xn;
      x = std::move(xn);
    }
    const double feas = full.violation(x);
    push_record(res.trace, cfg, psi, k, x, start, disp, feas);
    if (disp <= cfg.residual_tol) {
      if (feas <= 10.0 * cfg.residual_tol) {
        res.trace.converged = true;
        break;
      }
      // Settled outputs with a gap: either the pieces do not meet, or the
      // residual simply lags the displacement; the probe decides.
      if (!known_feasible) {
        const double gap = cyclic_probe(psi, pieces, full, x, inner, 20 * kProbationWindow);
        if (gap > std::max(1e-9, 10.0 * cfg.residual_tol)) {
          char buf[32];
          std::snprintf(buf, sizeof buf, "%.3g", feas);
          throw InfeasibleError("possibly empty intersection (feasibility residual " + std::string(buf) +
                                    " after " + std::to_string(res.trace.records.size()) + " cycles)",
                                res.trace);
        }
        known_feasible = true;
      }
    }
    if (!known_feasible && feas > 1e-6 && stagnating(res.trace)) {
      if (cyclic_probe(psi, pieces, full, x, inner, 20 * kProbationWindow) > std::max(1e-9, 10.0 * cfg.residual_tol))
        throw InfeasibleError("possibly empty intersection: displacement stagnates at " +
                                  std::to_string(disp),
                              res.trace);
      known_feasible = true;
    }
    if (k == cfg.max_cycles) {
      if (!known_feasible && feas > 10.0 * cfg.residual_tol &&
          cyclic_probe(psi, pieces, full, x, inner, 20 * kProbationWindow) > std::max(1e-9, 10.0 * cfg.residual_tol))
        throw InfeasibleError("possibly empty intersection: no convergence in max_cycles",
                              res.trace);
      throw ToleranceError("dykstra: displacement " + std::to_string(disp) +
                           " above tolerance after max_cycles");
    }
  }
  res.status = ProjectionStatus::Ok;
  res.point = x;
  res.method = "dykstra";
  return res;
}

ZResult cyclic_z(const Potential& psi, const AffineSystem& rows, const Point& z,
                 const SolveConfig& cfg) {
  ZResult res;
  res.trace.method = "cyclic_bregman";
  const Eigen::Index cd = z.ambient().coordinate_dim();
  if (!reduce_affine(rows, cd))
    throw InfeasibleError("possibly empty intersection: inconsistent affine rows", res.trace);
  const Eigen::Index m = rows.A.rows();
  Point x = z;
  std::vector<Point> last(static_cast<std::size_t>(m), z);
  for (int k = 1; k <= cfg.max_cycles; ++k) {
    const Point start = x;
    double disp = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      Point xn = hyperplane_projection(psi, rows.A.row(i).transpose(), rows.b(i), x);
      disp = std::max(disp, distance(xn, last[static_cast<std::size_t>(i)]));
      last[static_cast<std::size_t>(i)] = xn;
      x = std::move(xn);
    }
    const double feas =
        m ? (rows.A * coords(x) - rows.b).lpNorm<Eigen::Infinity>() : 0.0;
    push_record(res.trace, cfg, psi, k, x, start, disp, feas);
    // Consistent rows: the residual lags the displacement by a factor set
    // by the row angles, so both must be small.
    if (disp <= cfg.residual_tol && feas <= 10.0 * cfg.residual_tol) {
      res.trace.converged = true;
      break;
    }
    if (k == cfg.max_cycles)
      throw ToleranceError("cyclic projections: no convergence within max_cycles");
  }
  res.status = ProjectionStatus::Ok;
  res.point = x;
  res.method = "cyclic_bregman";
  return res;
}

ZResult left_project_z(const Potential& psi, const ConstraintSet& set, const Point& z,
                       const SolveConfig& cfg) {
  ZResult res;
  if (set.is_empty()) {
    res.status = ProjectionStatus::Empty;
    res.method = "empty";
    return res;
  }
  if (!psi.in_interior(z) && psi.in_domain(z) && set.membership(z, 1e-13)) {
    // members on the boundary of dom Psi are their own projection
    res.status = ProjectionStatus::Ok;
    res.point = z;
    res.method = res.trace.method = "member";
    res.trace.converged = true;
    return res;
  }
  // the entropic closed forms hold on the closed orthant (zeros stay zero)
  if (!(entropy(psi) && psi.in_domain(z) && z.vec().maxCoeff() > 0.0)) require_interior(psi, z);
  if (auto p = closed_form_z(psi, set, z, res.method)) {
    res.status = ProjectionStatus::Ok;
    res.point = std::move(*p);
    res.trace.method = res.method;
    res.trace.converged = true;
    return res;
  }
  require_interior(psi, z);
  auto parts = decompose(psi, set, z);
  if (!parts) {
    res.method = "unsupported";
    return res;
  }
  const bool rows_only = std::all_of(parts->begin(), parts->end(), single_row);
  if (rows_only) {
    AffineSystem rows{Eigen::MatrixXd(static_cast<Eigen::Index>(parts->size()),
                                      set.ambient().coordinate_dim()),
                      Eigen::VectorXd(static_cast<Eigen::Index>(parts->size()))};
    for (std::size_t i = 0; i < parts->size(); ++i) {
      const auto& s = std::get<AffineSystem>((*parts)[i].pieces()[0]);
      rows.A.row(static_cast<Eigen::Index>(i)) = s.A.row(0);
      rows.b(static_cast<Eigen::Index>(i)) = s.b(0);
    }
    if (rows.A.rows() == 1) {
      res.status = ProjectionStatus::Ok;
      res.point = hyperplane_projection(psi, rows.A.row(0).transpose(), rows.b(0), z);
      res.method = res.trace.method = "hyperplane";
      res.trace.converged = true;
      return res;
    }
    return cyclic_z(psi, rows, z, cfg);
  }
  if (parts->size() == 1) {
    res.status = ProjectionStatus::Ok;
    res.point = project_piece_z(psi, (*parts)[0], z, cfg);
    res.method = res.trace.method = "single_piece";
    res.trace.converged = true;
    return res;
  }
  return dykstra_z(psi, *parts, set, z, cfg);
}

ProjectionResult to_state(ZResult z, const EmbeddingMap& emb) {
  ProjectionResult r;
  r.status = z.status;
  r.method = z.method;
  r.trace = std::move(z.trace);
  if (z.status == ProjectionStatus::Ok) r.point = emb.inverse(z.point);
  for (auto& rec : r.trace.records)
    if (rec.iterate.is_matrix() || rec.iterate.vec().size() > 0) rec.iterate = emb.inverse(rec.iterate);
  return r;
}

void check_target(const DivergenceSpec& spec, const ConstraintSet& target, const char* what) {
  if (!(target.ambient() == spec.ambient()))
    throw ArgumentError(std::string(what) + ": target lives in a different ambient");
}

}  // namespace

std::string to_string(Side side) { return side == Side::Left ? "left" : "right"; }

void SolveConfig::validate() const {
  if (max_cycles < 1) throw ArgumentError("solve config: max_cycles must be >= 1");
  if (!(residual_tol > 0.0)) throw ArgumentError("solve config: residual_tol must be > 0");
}

bool affine_relative_to(const Potential& psi, const ConstraintSet& set) {
  if (set.is_affine()) return true;
  const auto& pieces = set.pieces();
  if (entropy(psi))
    return std::all_of(pieces.begin(), pieces.end(), [](const Piece& p) {
      return std::holds_alternative<Simplex>(p) || is_equality_piece(p);
    });
  if (von_neumann(psi))
    return std::all_of(pieces.begin(), pieces.end(), [](const Piece& p) {
      return std::holds_alternative<SpectralSimplex>(p) || is_equality_piece(p);
    });
  return false;
}

bool same_spec(const DivergenceSpec& a, const DivergenceSpec& b) {
  const bool pot = same_potential(a.potential, b.potential) ||
                   (a.potential.kind() == b.potential.kind() &&
                    a.potential.is_conjugate() == b.potential.is_conjugate() &&
                    a.potential.ambient() == b.potential.ambient() &&
                    a.potential.name() == b.potential.name());
  return pot && a.embedding.kind() == b.embedding.kind() &&
         a.embedding.gamma() == b.embedding.gamma() && a.embedding.name() == b.embedding.name();
}

ProjectionResult left_project_closed_form(const DivergenceSpec& spec, const ConstraintSet& target,
                                          const Point& y) {
  check_target(spec, target, "left_project_closed_form");
  require_ambient(y, spec.ambient(), "left_project_closed_form");
  ZResult z;
  if (target.is_empty()) {
    z.status = ProjectionStatus::Empty;
    z.method = "empty";
    return to_state(std::move(z), spec.embedding);
  }
  const Point zy = spec.embedding.forward(y);
  require_interior(spec.potential, zy);
  if (auto p = closed_form_z(spec.potential, target, zy, z.method)) {
    z.status = ProjectionStatus::Ok;
    z.point = std::move(*p);
    z.trace.method = z.method;
    z.trace.converged = true;
  } else {
    z.method = "unsupported";
  }
  return to_state(std::move(z), spec.embedding);
}

ProjectionResult left_project_dykstra(const DivergenceSpec& spec,
                                      const std::vector<ConstraintSet>& pieces, const Point& y,
                                      const SolveConfig& cfg) {
  cfg.validate();
  require_ambient(y, spec.ambient(), "left_project_dykstra");
  ConstraintSet full(spec.ambient());
  for (const auto& p : pieces) {
    check_target(spec, p, "left_project_dykstra");
    full = intersect(full, p);
  }
  if (full.is_empty() || pieces.empty()) {
    ZResult z;
    z.status = pieces.empty() ? ProjectionStatus::Ok : ProjectionStatus::Empty;
    z.point = spec.embedding.forward(y);
    z.method = pieces.empty() ? "identity" : "empty";
    return to_state(std::move(z), spec.embedding);
  }
  const Point zy = spec.embedding.forward(y);
  require_interior(spec.potential, zy);
  return to_state(dykstra_z(spec.potential, pieces, full, zy, cfg), spec.embedding);
}

ProjectionResult cyclic_bregman_affine(const DivergenceSpec& spec, const AffineSystem& rows,
                                       const Point& y, const SolveConfig& cfg) {
  cfg.validate();
  require_ambient(y, spec.ambient(), "cyclic_bregman_affine");
  if (rows.A.cols() != spec.ambient().coordinate_dim() || rows.A.rows() != rows.b.size())
    throw ArgumentError("cyclic_bregman_affine: rows have the wrong shape");
  const Point zy = spec.embedding.forward(y);
  require_interior(spec.potential, zy);
  return to_state(cyclic_z(spec.potential, rows, zy, cfg), spec.embedding);
}

ProjectionResult left_project(const DivergenceSpec& spec, const ConstraintSet& target,
                              const Point& y, const SolveConfig& cfg) {
  cfg.validate();
  check_target(spec, target, "left_project");
  require_ambient(y, spec.ambient(), "left_project");
  if (target.is_empty()) return to_state(left_project_z(spec.potential, target, y, cfg), spec.embedding);
  const Point zy = spec.embedding.forward(y);
  return to_state(left_project_z(spec.potential, target, zy, cfg), spec.embedding);
}

ProjectionResult right_project(const DivergenceSpec& spec, const ConstraintSet& dual_target,
                               const Point& y, const SolveConfig& cfg) {
  cfg.validate();
  check_target(spec, dual_target, "right_project");
  require_ambient(y, spec.ambient(), "right_project");
  const Potential& psi = spec.potential;
  if (dual_target.is_empty()) {
    ProjectionResult r;
    r.status = ProjectionStatus::Empty;
    r.method = "empty";
    return r;
  }
  const Point zy = spec.embedding.forward(y);
  // log is finite on all of the open orthant, below the interior threshold too
  const Point u = entropy(psi) && zy.vec().minCoeff() > 0.0 ? Point(Eigen::VectorXd(zy.vec().array().log()))
                                                           : psi.grad(zy);
  ZResult z = left_project_z(psi.conjugate(), dual_target, u, cfg);
  if (z.status == ProjectionStatus::Ok) z.point = psi.conjugate_grad(z.point);
  for (auto& rec : z.trace.records)
    if (rec.iterate.is_matrix() || rec.iterate.vec().size() > 0)
      rec.iterate = psi.conjugate_grad(rec.iterate);
  z.method = "right:" + z.method;
  return to_state(std::move(z), spec.embedding);
}

double pythagorean_residual(const DivergenceSpec& spec, const ConstraintSet& target,
                            const Point& x, const Point& y, Side side, const SolveConfig& cfg) {
  const auto D = [&](const Point& a, const Point& b) {
    const ExtendedReal v = embedded_divergence(spec, a, b);
    if (v.is_infinite()) throw DomainError("pythagorean_residual: infinite divergence");
    return v.value();
  };
  if (side == Side::Left) {
    if (!target.membership(spec.embedding.forward(x), 1e-7))
      throw ArgumentError("pythagorean_residual: x is not in the target");
    const ProjectionResult p = left_project(spec, target, y, cfg);
    if (!p.ok()) throw ArgumentError("pythagorean_residual: projection " + p.method);
    return D(x, y) - D(x, p.point) - D(p.point, y);
  }
  const Point gx = spec.potential.grad(spec.embedding.forward(x));
  if (!target.membership(gx, 1e-7))
    throw ArgumentError("pythagorean_residual: x is not in grad Psi*(M)");
  const ProjectionResult r = right_project(spec, target, y, cfg);
  if (!r.ok()) throw ArgumentError("pythagorean_residual: projection " + r.method);
  return D(y, x) - D(y, r.point) - D(r.point, x);
}

ProjectionResult ProjectionOperator::run(const Point& y, const SolveConfig& cfg) const {
  return side == Side::Left ? left_project(spec, target, y, cfg)
                            : right_project(spec, target, y, cfg);
}

Point ProjectionOperator::apply(const Point& y, const SolveConfig& cfg) const {
  ProjectionResult r = run(y, cfg);
  if (r.status == ProjectionStatus::Empty)
    throw InfeasibleError("empty arrow: projection onto the empty set", r.trace);
  if (r.status == ProjectionStatus::Unsupported)
    throw ArgumentError("unsupported " + to_string(side) + " projection onto " + target.describe() +
                        " for " + spec.name());
  return r.point;
}

ProjectionOperator diamond(const ProjectionOperator& a, const ProjectionOperator& b) {
  if (a.side != Side::Left || b.side != Side::Left)
    throw ArgumentError("diamond: only left projections compose by intersection");
  if (!same_spec(a.spec, b.spec)) throw ArgumentError("diamond: operators have different specs");
  return ProjectionOperator(Side::Left, a.spec, intersect(a.target, b.target));
}

}  // namespace bregman
