#include "bregman/sets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bregman/errors.hpp"
#include "bregman/random.hpp"
#include "bregman/spectral.hpp"

namespace bregman {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kRankThreshold = 1e-10;

Eigen::MatrixXcd identity_like(const Ambient& a) {
  return Eigen::MatrixXcd::Identity(a.dim, a.dim);
}

/// Euclidean projection of v onto { x >= 0, sum x = total } (sort based).
Eigen::VectorXd project_simplex(const Eigen::VectorXd& v, double total) {
  const Eigen::Index n = v.size();
  if (n == 0) return v;
  if (total <= 0.0) return Eigen::VectorXd::Zero(n);
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0, theta = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    cum += u[k];
    const double t = (cum - total) / static_cast<double>(k + 1);
    if (u[k] - t > 0.0) theta = t;
  }
  return (v.array() - theta).max(0.0).matrix();
}

double lp_norm(const Eigen::VectorXd& x, double p) {
  if (std::isinf(p)) return x.lpNorm<Eigen::Infinity>();
  if (p == 1.0) return x.lpNorm<1>();
  if (p == 2.0) return x.norm();
  return std::pow(x.array().abs().pow(p).sum(), 1.0 / p);
}

void check_piece(const Piece& piece, const Ambient& amb) {
  const Eigen::Index cd = amb.coordinate_dim();
  const bool vec = amb.kind == PointKind::Vector;
  std::visit(overloaded{
                 [&](const AffineSystem& s) {
                   if (s.A.cols() != cd || s.A.rows() != s.b.size())
                     throw ArgumentError("affine piece: A must be m x " + std::to_string(cd) +
                                         " with b of length m");
                 },
                 [&](const Halfspace& h) {
                   if (h.a.size() != cd)
                     throw ArgumentError("halfspace piece: normal has wrong dimension");
                 },
                 [&](const Box& b) {
                   if (!vec) throw ArgumentError("box piece requires a vector ambient");
                   if (b.lo.size() != amb.dim || b.hi.size() != amb.dim)
                     throw ArgumentError("box piece: bounds have wrong dimension");
                 },
                 [&](const Simplex&) {
                   if (!vec) throw ArgumentError("simplex piece requires a vector ambient");
                 },
                 [&](const NormBall& nb) {
                   if (!(nb.p >= 1.0)) throw ArgumentError("norm ball: p must be >= 1");
                   if (!vec && nb.p != 2.0)
                     throw ArgumentError("norm ball on matrices: only the Frobenius norm (p = 2)");
                 },
                 [&](const SpectralTrace&) {
                   if (vec) throw ArgumentError("spectral trace piece requires a matrix ambient");
                 },
                 [&](const SpectralExpectation& e) {
                   if (vec)
                     throw ArgumentError("spectral expectation piece requires a matrix ambient");
                   if (e.H.rows() != amb.dim || e.H.cols() != amb.dim)
                     throw ArgumentError("spectral expectation: H has wrong size");
                   if (spectral::max_asymmetry(e.H) > 1e-10)
                     throw ArgumentError("spectral expectation: H is not hermitian");
                 },
                 [&](const SpectralSimplex&) {
                   if (vec) throw ArgumentError("spectral simplex requires a matrix ambient");
                 },
             },
             piece);
}

bool trivially_empty(const Piece& piece) {
  if (const auto* b = std::get_if<Box>(&piece)) return (b->lo.array() > b->hi.array()).any();
  if (const auto* s = std::get_if<Simplex>(&piece)) return s->total < 0.0;
  if (const auto* nb = std::get_if<NormBall>(&piece)) return nb->radius < 0.0;
  return false;
}

AffineSystem stack(const AffineSystem& a, const AffineSystem& b, Eigen::Index cd) {
  AffineSystem out;
  out.A.resize(a.A.rows() + b.A.rows(), cd);
  out.b.resize(a.b.size() + b.b.size());
  if (a.A.rows() > 0) out.A.topRows(a.A.rows()) = a.A;
  if (b.A.rows() > 0) out.A.bottomRows(b.A.rows()) = b.A;
  out.b << a.b, b.b;
  return out;
}

AffineSystem no_rows(Eigen::Index cd) { return {Eigen::MatrixXd(0, cd), Eigen::VectorXd(0)}; }

/// Minimum-norm solution of A x = b.
Eigen::VectorXd min_norm_solution(const AffineSystem& s, Eigen::Index cd) {
  if (s.A.rows() == 0) return Eigen::VectorXd::Zero(cd);
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(s.A);
  cod.setThreshold(kRankThreshold);
  return cod.solve(s.b);
}

}  // namespace

// ---------------------------------------------------------------------------
// primitives

std::string piece_name(const Piece& piece) {
  std::ostringstream os;
  os.precision(6);
  std::visit(overloaded{
                 [&](const AffineSystem& s) { os << "affine(" << s.A.rows() << " rows)"; },
                 [&](const Halfspace& h) { os << "halfspace(c=" << h.c << ")"; },
                 [&](const Box&) { os << "box"; },
                 [&](const Simplex& s) { os << "simplex(" << s.total << ")"; },
                 [&](const NormBall& b) { os << "ball(p=" << b.p << ",r=" << b.radius << ")"; },
                 [&](const SpectralTrace& t) { os << "trace(" << t.t << ")"; },
                 [&](const SpectralExpectation& e) { os << "expectation(" << e.e << ")"; },
                 [&](const SpectralSimplex&) { os << "spectral_simplex"; },
             },
             piece);
  return os.str();
}

bool is_equality_piece(const Piece& piece) {
  return std::holds_alternative<AffineSystem>(piece) ||
         std::holds_alternative<SpectralTrace>(piece) ||
         std::holds_alternative<SpectralExpectation>(piece);
}

double piece_violation(const Piece& piece, const Point& x) {
  return std::visit(
      overloaded{
          [&](const AffineSystem& s) {
            if (s.A.rows() == 0) return 0.0;
            return (s.A * coords(x) - s.b).lpNorm<Eigen::Infinity>();
          },
          [&](const Halfspace& h) { return std::max(0.0, h.a.dot(coords(x)) - h.c); },
          [&](const Box& b) {
            const auto& v = x.vec();
            double m = 0.0;
            for (Eigen::Index i = 0; i < v.size(); ++i)
              m = std::max({m, b.lo(i) - v(i), v(i) - b.hi(i)});
            return m;
          },
          [&](const Simplex& s) {
            const auto& v = x.vec();
            const double neg = v.size() ? -v.minCoeff() : 0.0;
            return std::max({0.0, neg, std::abs(v.sum() - s.total)});
          },
          [&](const NormBall& b) {
            const double r = x.is_vector() ? lp_norm(x.vec(), b.p) : norm(x);
            return std::max(0.0, r - b.radius);
          },
          [&](const SpectralTrace& t) { return std::abs(spectral::trace_re(x.mat()) - t.t); },
          [&](const SpectralExpectation& e) {
            return std::abs(inner(Point(spectral::hermitian_part(e.H)), x) - e.e);
          },
          [&](const SpectralSimplex&) {
            return std::max({0.0, -spectral::min_eigenvalue(x.mat()),
                             std::abs(spectral::trace_re(x.mat()) - 1.0)});
          },
      },
      piece);
}

Point metric_projection(const Piece& piece, const Point& x) {
  return std::visit(
      overloaded{
          [&](const AffineSystem& s) -> Point {
            if (s.A.rows() == 0) return x;
            const Eigen::VectorXd c = coords(x);
            Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(s.A);
            cod.setThreshold(kRankThreshold);
            const Eigen::VectorXd shift = cod.solve(Eigen::VectorXd(s.A * c - s.b));
            return from_coords(c - shift, x.ambient());
          },
          [&](const Halfspace& h) -> Point {
            const Eigen::VectorXd c = coords(x);
            const double excess = h.a.dot(c) - h.c;
            if (excess <= 0.0) return x;
            return from_coords(c - (excess / h.a.squaredNorm()) * h.a, x.ambient());
          },
          [&](const Box& b) -> Point {
            return Point(Eigen::VectorXd(x.vec().cwiseMax(b.lo).cwiseMin(b.hi)));
          },
          [&](const Simplex& s) -> Point { return Point(project_simplex(x.vec(), s.total)); },
          [&](const NormBall& b) -> Point {
            if (x.is_matrix() || b.p == 2.0) {
              const double r = norm(x);
              return r <= b.radius ? x : (b.radius / r) * x;
            }
            const Eigen::VectorXd& v = x.vec();
            if (std::isinf(b.p))
              return Point(Eigen::VectorXd(v.cwiseMax(-b.radius).cwiseMin(b.radius)));
            if (b.p == 1.0) {
              if (v.lpNorm<1>() <= b.radius) return x;
              const Eigen::VectorXd m = project_simplex(v.cwiseAbs(), b.radius);
              return Point(Eigen::VectorXd(m.cwiseProduct(v.unaryExpr(
                  [](double t) { return t < 0.0 ? -1.0 : 1.0; }))));
            }
            throw ArgumentError("metric projection onto a p-ball: only p in {1, 2, inf}");
          },
          [&](const SpectralTrace& t) -> Point {
            const Eigen::Index d = x.mat().rows();
            const double shift = (t.t - spectral::trace_re(x.mat())) / static_cast<double>(d);
            return Point(Eigen::MatrixXcd(x.mat() + shift * identity_like(x.ambient())));
          },
          [&](const SpectralExpectation& e) -> Point {
            const Point h(spectral::hermitian_part(e.H));
            const double hh = inner(h, h);
            if (hh == 0.0) return x;
            return x + ((e.e - inner(h, x)) / hh) * h;
          },
          [&](const SpectralSimplex&) -> Point {
            spectral::Eigensystem es = spectral::eigh(x.mat());
            const Eigen::VectorXd lam = project_simplex(es.values, 1.0);
            return Point(Eigen::MatrixXcd(es.vectors * lam.cast<std::complex<double>>().asDiagonal() *
                                          es.vectors.adjoint()));
          },
      },
      piece);
}

AffineSystem equality_rows(const Piece& piece, const Ambient& ambient) {
  const Eigen::Index cd = ambient.coordinate_dim();
  AffineSystem out = no_rows(cd);
  const auto one_row = [&](const Eigen::VectorXd& a, double b) {
    out.A = a.transpose();
    out.b = Eigen::VectorXd::Constant(1, b);
  };
  if (const auto* s = std::get_if<AffineSystem>(&piece)) return *s;
  if (const auto* t = std::get_if<SpectralTrace>(&piece))
    one_row(coords(Point(identity_like(ambient))), t->t);
  if (const auto* e = std::get_if<SpectralExpectation>(&piece))
    one_row(coords(Point(spectral::hermitian_part(e->H))), e->e);
  if (const auto* s = std::get_if<Simplex>(&piece)) one_row(Eigen::VectorXd::Ones(cd), s->total);
  if (std::holds_alternative<SpectralSimplex>(piece))
    one_row(coords(Point(identity_like(ambient))), 1.0);
  return out;
}

std::optional<AffineSystem> reduce_affine(const AffineSystem& sys, Eigen::Index coord_dim) {
  const Eigen::Index m = sys.A.rows();
  if (m == 0) return no_rows(coord_dim);
  const Eigen::VectorXd x = min_norm_solution(sys, coord_dim);
  const double scale = std::max(1.0, sys.b.lpNorm<Eigen::Infinity>());
  if ((sys.A * x - sys.b).lpNorm<Eigen::Infinity>() > 1e-9 * scale) return std::nullopt;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sys.A.transpose());
  qr.setThreshold(kRankThreshold);
  const Eigen::Index r = qr.rank();
  std::vector<Eigen::Index> keep(r);
  for (Eigen::Index k = 0; k < r; ++k) keep[k] = qr.colsPermutation().indices()(k);
  std::sort(keep.begin(), keep.end());
  AffineSystem out{Eigen::MatrixXd(r, coord_dim), Eigen::VectorXd(r)};
  for (Eigen::Index k = 0; k < r; ++k) {
    out.A.row(k) = sys.A.row(keep[k]);
    out.b(k) = sys.b(keep[k]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// ConstraintSet

ConstraintSet::ConstraintSet(const Ambient& ambient, std::vector<Piece> pieces)
    : ambient_(ambient), pieces_(std::move(pieces)) {
  normalise();
}

ConstraintSet ConstraintSet::empty(const Ambient& ambient) {
  ConstraintSet s(ambient);
  s.empty_ = true;
  return s;
}

void ConstraintSet::normalise() {
  const Eigen::Index cd = ambient_.coordinate_dim();
  for (const Piece& p : pieces_) check_piece(p, ambient_);
  for (const Piece& p : pieces_)
    if (trivially_empty(p)) {
      pieces_.clear();
      empty_ = true;
      return;
    }

  // merge AffineSystem pieces at the position of the first one
  std::vector<Piece> out;
  AffineSystem merged = no_rows(cd);
  std::ptrdiff_t slot = -1;
  for (Piece& p : pieces_) {
    if (auto* s = std::get_if<AffineSystem>(&p)) {
      if (slot < 0) {
        slot = static_cast<std::ptrdiff_t>(out.size());
        out.emplace_back(AffineSystem{});
      }
      merged = stack(merged, *s, cd);
    } else {
      out.push_back(std::move(p));
    }
  }
  if (slot >= 0) {
    auto reduced = reduce_affine(merged, cd);
    if (!reduced) {
      pieces_.clear();
      empty_ = true;
      return;
    }
    if (reduced->A.rows() == 0)
      out.erase(out.begin() + slot);
    else
      out[slot] = std::move(*reduced);
  }
  pieces_ = std::move(out);

  AffineSystem all = no_rows(cd);
  for (const Piece& p : pieces_) all = stack(all, equality_rows(p, ambient_), cd);
  if (!reduce_affine(all, cd)) {
    pieces_.clear();
    empty_ = true;
  }
}

ConstraintSet ConstraintSet::affine(const Ambient& ambient, Eigen::MatrixXd A, Eigen::VectorXd b) {
  return ConstraintSet(ambient, {AffineSystem{std::move(A), std::move(b)}});
}

ConstraintSet ConstraintSet::hyperplane(const Ambient& ambient, Eigen::VectorXd a, double c) {
  Eigen::MatrixXd A = a.transpose();
  return affine(ambient, std::move(A), Eigen::VectorXd::Constant(1, c));
}

ConstraintSet ConstraintSet::halfspace(const Ambient& ambient, Eigen::VectorXd a, double c) {
  return ConstraintSet(ambient, {Halfspace{std::move(a), c}});
}

ConstraintSet ConstraintSet::box(Eigen::VectorXd lo, Eigen::VectorXd hi) {
  const Ambient amb = Ambient::vector(lo.size());
  return ConstraintSet(amb, {Box{std::move(lo), std::move(hi)}});
}

ConstraintSet ConstraintSet::simplex(Eigen::Index dim, double total) {
  return ConstraintSet(Ambient::vector(dim), {Simplex{total}});
}

ConstraintSet ConstraintSet::norm_ball(const Ambient& ambient, double p, double radius) {
  return ConstraintSet(ambient, {NormBall{p, radius}});
}

ConstraintSet ConstraintSet::spectral_trace(Eigen::Index side, double t) {
  return ConstraintSet(Ambient::matrix(side), {SpectralTrace{t}});
}

ConstraintSet ConstraintSet::spectral_expectation(Eigen::MatrixXcd H, double e) {
  const Ambient amb = Ambient::matrix(H.rows());
  return ConstraintSet(amb, {SpectralExpectation{std::move(H), e}});
}

ConstraintSet ConstraintSet::spectral_simplex(Eigen::Index side) {
  return ConstraintSet(Ambient::matrix(side), {SpectralSimplex{}});
}

bool ConstraintSet::is_affine() const {
  return std::all_of(pieces_.begin(), pieces_.end(), is_equality_piece);
}

AffineSystem ConstraintSet::affine_hull_rows() const {
  const Eigen::Index cd = ambient_.coordinate_dim();
  AffineSystem all = no_rows(cd);
  for (const Piece& p : pieces_) all = stack(all, equality_rows(p, ambient_), cd);
  auto r = reduce_affine(all, cd);
  return r ? *r : all;
}

std::optional<AffineSystem> ConstraintSet::affine_piece() const {
  for (const Piece& p : pieces_)
    if (const auto* s = std::get_if<AffineSystem>(&p)) return *s;
  return std::nullopt;
}

double ConstraintSet::violation(const Point& x) const {
  require_ambient(x, ambient_, "membership");
  if (empty_) return std::numeric_limits<double>::infinity();
  double v = 0.0;
  for (const Piece& p : pieces_) v = std::max(v, piece_violation(p, x));
  return v;
}

bool ConstraintSet::membership(const Point& x, double tol) const {
  return !empty_ && violation(x) <= tol;
}

std::vector<ConstraintSet> ConstraintSet::split() const {
  std::vector<ConstraintSet> out;
  for (const Piece& p : pieces_) out.emplace_back(ambient_, std::vector<Piece>{p});
  return out;
}

std::string ConstraintSet::describe() const {
  if (empty_) return "empty";
  if (pieces_.empty()) return "whole";
  std::string s;
  for (const Piece& p : pieces_) s += (s.empty() ? "" : " & ") + piece_name(p);
  return s;
}

ConstraintSet intersect(const ConstraintSet& s1, const ConstraintSet& s2) {
  if (!(s1.ambient() == s2.ambient()))
    throw ArgumentError("intersect: sets live in different ambients");
  if (s1.is_empty() || s2.is_empty()) return ConstraintSet::empty(s1.ambient());
  std::vector<Piece> pieces = s1.pieces();
  pieces.insert(pieces.end(), s2.pieces().begin(), s2.pieces().end());
  return ConstraintSet(s1.ambient(), std::move(pieces));
}

ConstraintSet affine_hull(const ConstraintSet& s) {
  if (s.is_empty()) return s;
  AffineSystem rows = s.affine_hull_rows();
  if (rows.A.rows() == 0) return ConstraintSet(s.ambient());
  return ConstraintSet(s.ambient(), {std::move(rows)});
}

// ---------------------------------------------------------------------------
// containment

namespace {

SubsetResult affine_subset(const ConstraintSet& s1, const ConstraintSet& s2) {
  const Ambient& amb = s1.ambient();
  const Eigen::Index cd = amb.coordinate_dim();
  const AffineSystem r1 = s1.affine_hull_rows();
  const Eigen::VectorXd x0 = min_norm_solution(r1, cd);
  SubsetResult res;
  res.exact = true;
  if (s2.is_empty()) {
    res.verdict = Verdict::False;
    res.witness = from_coords(x0, amb);
    return res;
  }
  const AffineSystem r2 = s2.affine_hull_rows();
  std::optional<Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>> cod;
  if (r1.A.rows() > 0) {
    cod.emplace(r1.A.transpose());
    cod->setThreshold(kRankThreshold);
  }
  for (Eigen::Index i = 0; i < r2.A.rows(); ++i) {
    const Eigen::VectorXd a = r2.A.row(i).transpose();
    // component of a outside the row space of A1 is a direction inside s1
    Eigen::VectorXd d = a;
    if (cod) d = a - r1.A.transpose() * cod->solve(a);
    const double gap = a.dot(x0) - r2.b(i);
    if (d.norm() > 1e-9 * std::max(1.0, a.norm())) {
      const double s = gap >= 0.0 ? 1.0 : -1.0;
      res.verdict = Verdict::False;
      res.witness = from_coords(x0 + (s / d.squaredNorm()) * d, amb);
      return res;
    }
    if (std::abs(gap) > 1e-9 * std::max(1.0, std::abs(r2.b(i)))) {
      res.verdict = Verdict::False;
      res.witness = from_coords(x0, amb);
      return res;
    }
  }
  res.verdict = Verdict::True;
  return res;
}

}  // namespace

SubsetResult subset_of(const ConstraintSet& s1, const ConstraintSet& s2, int witness_budget,
                       std::uint64_t seed) {
  if (!(s1.ambient() == s2.ambient()))
    throw ArgumentError("subset_of: sets live in different ambients");
  SubsetResult res;
  if (s1.is_empty()) {
    res.verdict = Verdict::True;
    res.exact = true;
    return res;
  }
  if (s1.is_affine() && s2.is_affine()) return affine_subset(s1, s2);
  if (s2.is_whole()) {
    res.verdict = Verdict::True;
    res.exact = true;
    return res;
  }
  for (const Point& x : sample_members(s1, witness_budget, seed)) {
    if (s2.violation(x) > 1e-7) {
      res.verdict = Verdict::False;
      res.witness = x;
      return res;
    }
  }
  return res;
}

Point metric_projection(const ConstraintSet& s, const Point& x, int max_cycles, double tol) {
  require_ambient(x, s.ambient(), "metric_projection");
  if (s.is_empty()) throw DomainError("metric_projection: empty set");
  const auto& pieces = s.pieces();
  if (pieces.empty()) return x;
  if (pieces.size() == 1) return metric_projection(pieces[0], x);
  std::vector<Point> inc(pieces.size(), zero_like(x));
  Point cur = x;
  for (int k = 0; k < max_cycles; ++k) {
    double disp = 0.0;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      const Point shifted = cur + inc[i];
      Point next = metric_projection(pieces[i], shifted);
      inc[i] = shifted - next;
      disp = std::max(disp, distance(next, cur));
      cur = std::move(next);
    }
    if (disp <= tol * std::max(1.0, norm(cur))) break;
  }
  return cur;
}

namespace {

// Dykstra leaves round-off on the wrong side of sign constraints (-1e-14),
// which puts samples outside the domain of entropy-type potentials.
void snap_to_bounds(const ConstraintSet& s, Point& m) {
  for (const Piece& p : s.pieces()) {
    if (std::holds_alternative<Simplex>(p) && m.is_vector()) {
      m.vec() = m.vec().cwiseMax(0.0);
    } else if (const auto* b = std::get_if<Box>(&p); b && m.is_vector()) {
      m.vec() = m.vec().cwiseMax(b->lo).cwiseMin(b->hi);
    } else if (std::holds_alternative<SpectralSimplex>(p) && m.is_matrix()) {
      m.mat() = spectral::apply(m.mat(), [](double x) { return std::max(x, 0.0); });
    }
  }
}

}  // namespace

std::vector<Point> sample_members(const ConstraintSet& s, int count, std::uint64_t seed) {
  std::vector<Point> out;
  if (s.is_empty() || count <= 0) return out;
  const Ambient& amb = s.ambient();
  std::vector<Point> raw;
  for (const Piece& p : s.pieces()) {
    if (const auto* sx = std::get_if<Simplex>(&p)) {
      for (Eigen::Index i = 0; i < amb.dim; ++i) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(amb.dim);
        v(i) = sx->total;
        raw.emplace_back(v);
      }
    } else if (const auto* b = std::get_if<Box>(&p)) {
      raw.emplace_back(b->lo);
      raw.emplace_back(b->hi);
    }
  }
  Rng rng(seed);
  const int attempts = 4 * count + static_cast<int>(raw.size());
  for (int k = 0; k < attempts && static_cast<int>(out.size()) < count; ++k) {
    Point z;
    if (k < static_cast<int>(raw.size())) {
      z = raw[k];
    } else if (amb.kind == PointKind::Vector) {
      z = Point(Eigen::VectorXd(2.0 * rng.normal_vector(amb.dim)));
    } else {
      z = Point(rng.hermitian(amb.dim));
    }
    Point m;
    try {
      m = metric_projection(s, z);
    } catch (const ArgumentError&) {
      continue;
    }
    snap_to_bounds(s, m);
    if (s.membership(m, 1e-10)) out.push_back(std::move(m));
  }
  return out;
}

bool PullbackSet::membership(const Point& x, double tol) const {
  try {
    return base_.membership(map_.grad(x), tol);
  } catch (const DomainError&) {
    return false;
  }
}

}  // namespace bregman
