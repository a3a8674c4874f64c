#include "bregman/category.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bregman/random.hpp"

namespace bregman {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool same_anchor(const ConstraintSet& a, const ConstraintSet& b) {
  if (!(a.ambient() == b.ambient())) return false;
  const SubsetResult ab = subset_of(a, b), ba = subset_of(b, a);
  return ab.verdict != Verdict::False && ba.verdict != Verdict::False;
}

double finite_or_inf(const ExtendedReal& v) { return v.value_or(kInf); }

}  // namespace

// ---------------------------------------------------------------------------
// Hom-monoid

HomMonoidElement HomMonoidElement::make(const DivergenceSpec& spec, const ConstraintSet& target,
                                        const ConstraintSet& anchor) {
  const SubsetResult r = subset_of(target, anchor);
  if (r.verdict == Verdict::False)
    throw ArgumentError("hom element: target " + target.describe() + " is not inside anchor " +
                        anchor.describe());
  return {ProjectionOperator(Side::Left, spec, target), anchor};
}

HomMonoidElement HomMonoidElement::zero(const DivergenceSpec& spec, const ConstraintSet& anchor) {
  return {ProjectionOperator(Side::Left, spec, anchor), anchor};
}

HomMonoidElement compose_diamond(const HomMonoidElement& e1, const HomMonoidElement& e2) {
  if (!same_anchor(e1.anchor, e2.anchor))
    throw ArgumentError("compose_diamond: elements have different anchors");
  return {diamond(e1.op, e2.op), e1.anchor};
}

SubsetResult hom_order(const HomMonoidElement& e1, const HomMonoidElement& e2,
                       int witness_budget) {
  return subset_of(e1.target(), e2.target(), witness_budget);
}

bool same_target(const HomMonoidElement& e1, const HomMonoidElement& e2) {
  return subset_of(e1.target(), e2.target()).verdict == Verdict::True &&
         subset_of(e2.target(), e1.target()).verdict == Verdict::True;
}

// ---------------------------------------------------------------------------
// naturality

NaturalityReport check_naturality_diagram(const DivergenceSpec& spec, const ConstraintSet& K,
                                          const ConstraintSet& L, const Point& phi,
                                          const Point& x, const SolveConfig& cfg) {
  const Potential& psi = spec.potential;
  if (!affine_relative_to(psi, K) || !affine_relative_to(psi, L))
    throw ArgumentError("naturality diagram: K and L must be affine");
  if (K.is_empty() || L.is_empty()) throw ArgumentError("naturality diagram: empty set");
  if (subset_of(affine_hull(L), affine_hull(K)).verdict != Verdict::True)
    throw ArgumentError("naturality diagram: L is not inside K");
  if (!L.membership(spec.embedding.forward(phi), 1e-7))
    throw ArgumentError("naturality diagram: phi is not in L");

  const auto D = [&](const Point& a, const Point& b) {
    return embedded_divergence(spec, a, b).value_or(kInf);
  };
  const auto project = [&](const ConstraintSet& s, const Point& y) {
    ProjectionResult r = left_project(spec, s, y, cfg);
    if (!r.ok()) throw ArgumentError("naturality diagram: projection " + r.method);
    return r.point;
  };
  NaturalityReport rep;
  rep.pk = project(K, x);
  rep.plk = project(L, rep.pk);
  rep.tower_gap = distance(rep.plk, project(L, x));
  rep.outer_residual = D(phi, x) - D(phi, rep.pk) - D(rep.pk, x);
  rep.inner_residual = D(phi, rep.pk) - D(phi, rep.plk) - D(rep.plk, rep.pk);
  rep.pass = std::abs(rep.outer_residual) <= 1e-7 && std::abs(rep.inner_residual) <= 1e-7;
  return rep;
}

// ---------------------------------------------------------------------------
// certification

std::string to_string(MapClass c) {
  switch (c) {
    case MapClass::CN: return "CN";
    case MapClass::LSQ: return "LSQ";
    case MapClass::RSQ: return "RSQ";
    case MapClass::Unclassified: return "unclassified";
  }
  return "unknown";
}

CertificateReport certify_class(const Map& T, const std::vector<Point>& samples,
                                const std::vector<Point>& fixed_points, const Divergence& D,
                                MapClass cls, const std::vector<std::vector<Point>>& sequences) {
  std::string offenders;
  for (std::size_t i = 0; i < fixed_points.size(); ++i)
    if (distance(T(fixed_points[i]), fixed_points[i]) > 1e-9)
      offenders += (offenders.empty() ? "" : ", ") + std::to_string(i);
  if (!offenders.empty())
    throw ArgumentError("certify_class: not fixed by T: points " + offenders);
  if (cls == MapClass::Unclassified) throw ArgumentError("certify_class: no class to certify");

  CertificateReport rep;
  rep.cls = cls;
  rep.max_violation = -kInf;
  const auto consider = [&](const ExtendedReal& lhs, const ExtendedReal& rhs, const Point& a,
                            const Point& b) {
    ++rep.pairs;
    if (rhs.is_infinite()) return;  // the inequality holds trivially
    const double v = finite_or_inf(lhs) - rhs.value();
    if (v > rep.max_violation) {
      rep.max_violation = v;
      rep.witness = std::make_pair(a, b);
    }
  };

  std::vector<Point> images;
  images.reserve(samples.size());
  for (const Point& s : samples) images.push_back(T(s));

  if (cls == MapClass::CN) {
    for (std::size_t i = 0; i < samples.size(); ++i)
      for (std::size_t j = 0; j < samples.size(); ++j)
        if (i != j) consider(D(images[i], images[j]), D(samples[i], samples[j]), samples[i], samples[j]);
  } else {
    for (const Point& p : fixed_points)
      for (std::size_t i = 0; i < samples.size(); ++i) {
        if (cls == MapClass::LSQ)
          consider(D(p, images[i]), D(p, samples[i]), p, samples[i]);
        else
          consider(D(images[i], p), D(samples[i], p), p, samples[i]);
      }
    rep.partial = true;
    rep.sequence_note = "sequential clause not checked";
    if (!sequences.empty()) {
      bool ok = true;
      for (const auto& seq : sequences) {
        if (seq.size() < 2) continue;
        for (const Point& p : fixed_points) {
          const auto gap = [&](const Point& x) {
            const Point tx = T(x);
            return cls == MapClass::LSQ
                       ? std::make_pair(finite_or_inf(D(p, x)) - finite_or_inf(D(p, tx)),
                                        finite_or_inf(D(tx, x)))
                       : std::make_pair(finite_or_inf(D(x, p)) - finite_or_inf(D(tx, p)),
                                        finite_or_inf(D(x, tx)));
          };
          const auto first = gap(seq.front()), last = gap(seq.back());
          if (last.first <= first.first && last.second > first.second + 1e-8) ok = false;
        }
      }
      rep.sequence_note = ok ? "trend consistent on supplied prefixes"
                             : "trend violated on a supplied prefix";
      if (!ok) rep.max_violation = std::max(rep.max_violation, kInf);
    }
  }
  if (rep.pairs == 0) rep.max_violation = 0.0;
  rep.pass = rep.max_violation <= 1e-8;
  if (rep.pass && rep.max_violation <= 0.0) rep.witness.reset();
  return rep;
}

ProjectionOperator fix_projection_functor(const Map& T, const DivergenceSpec& spec,
                                          const std::vector<Point>& seeds, std::uint64_t seed) {
  if (seeds.empty()) throw ArgumentError("fix_projection_functor: no seed points");
  const Ambient amb = spec.ambient();
  const Eigen::Index cd = amb.coordinate_dim();
  std::vector<Eigen::VectorXd> limits;
  for (const Point& s0 : seeds) {
    require_ambient(s0, amb, "fix_projection_functor");
    Point x = s0;
    bool done = false;
    for (int k = 0; k < 100000; ++k) {
      Point tx = T(x);
      const double d = distance(tx, x);
      x = std::move(tx);
      if (d <= 1e-10) {
        done = true;
        break;
      }
    }
    if (!done) throw ToleranceError("fix_projection_functor: iterates did not converge");
    limits.push_back(coords(spec.embedding.forward(x)));
  }

  const Eigen::VectorXd base = limits.front();
  Eigen::MatrixXd dirs(cd, static_cast<Eigen::Index>(limits.size()) - 1);
  for (std::size_t j = 1; j < limits.size(); ++j)
    dirs.col(static_cast<Eigen::Index>(j) - 1) = limits[j] - base;
  Eigen::MatrixXd basis(cd, 0);
  Eigen::MatrixXd normal = Eigen::MatrixXd::Identity(cd, cd);
  if (dirs.cols() > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(dirs, Eigen::ComputeFullU);
    const double top = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()(i) > 1e-8 * std::max(1.0, top)) ++rank;
    basis = svd.matrixU().leftCols(rank);
    normal = svd.matrixU().rightCols(cd - rank).transpose();
  }
  const Eigen::Index rank = basis.cols();
  if (rank > 0) {
    // validity: T must fix points of the hull, not only the limits
    Rng rng(seed);
    const double spread = std::max(1.0, dirs.cwiseAbs().maxCoeff());
    for (int k = 0; k < 20; ++k) {
      const Eigen::VectorXd c = base + basis * (0.5 * spread * rng.normal_vector(rank));
      const Point p = spec.embedding.inverse(from_coords(c, amb));
      Point tp;
      try {
        tp = T(p);
      } catch (const DomainError&) {
        continue;  // outside the domain of T
      }
      if (distance(tp, p) > 1e-7 * std::max(1.0, norm(p)))
        throw ConstructionError("Fix(T) not affine-representable");
    }
  }
  if (rank == cd) return ProjectionOperator(Side::Left, spec, ConstraintSet(amb));
  // rank 0 is the single limit point
  return ProjectionOperator(Side::Left, spec, ConstraintSet(amb, {AffineSystem{normal, normal * base}}));
}

// ---------------------------------------------------------------------------
// deficiency

ParametrizedModel::ParametrizedModel(std::vector<Eigen::VectorXd> g, std::vector<Point> imgs)
    : grid(std::move(g)), images(std::move(imgs)) {
  if (grid.size() != images.size())
    throw ConstructionError("parametrized model: grid and images differ in size");
  for (std::size_t i = 0; i < images.size(); ++i)
    for (std::size_t j = i + 1; j < images.size(); ++j)
      if (!(distance(images[i], images[j]) > 1e-9))
        throw ConstructionError("parametrized model: chart is not injective on the grid (" +
                                std::to_string(i) + ", " + std::to_string(j) + ")");
}

ParametrizedModel ParametrizedModel::from_chart(
    std::vector<Eigen::VectorXd> grid, const std::function<Point(const Eigen::VectorXd&)>& chart) {
  std::vector<Point> imgs;
  imgs.reserve(grid.size());
  for (const auto& t : grid) imgs.push_back(chart(t));
  return ParametrizedModel(std::move(grid), std::move(imgs));
}

DeficiencyResult deficiency(const ParametrizedModel& M1, const ParametrizedModel& M2,
                            const CandidateMapSet& cands, const Divergence& D) {
  if (cands.empty()) throw ArgumentError("deficiency: empty candidate set");
  if (M1.size() != M2.size()) throw ArgumentError("deficiency: models use different grids");
  DeficiencyResult res;
  res.value = ExtendedReal::infinity();
  for (std::size_t c = 0; c < cands.size(); ++c) {
    ExtendedReal worst = 0.0;
    for (std::size_t t = 0; t < M1.size() && worst.is_finite(); ++t) {
      ExtendedReal v;
      try {
        v = D(M2.images[t], cands[c].map(M1.images[t]));
      } catch (const DomainError&) {
        v = ExtendedReal::infinity();
      }
      if (worst < v) worst = v;
    }
    res.per_candidate.push_back(worst);
    if (worst < res.value) {
      res.value = worst;
      res.best = c;
    }
  }
  return res;
}

DeficiencyResult deficiency(const ParametrizedModel& M1, const ParametrizedModel& M2,
                            const CandidateMapSet& cands, const DivergenceSpec& spec) {
  return deficiency(M1, M2, cands, Divergence::from_spec(spec));
}

bool epsilon_deficiency(const ParametrizedModel& M1, const ParametrizedModel& M2,
                        const CandidateMapSet& cands, const Divergence& D, ExtendedReal eps) {
  return deficiency(M1, M2, cands, D).value <= eps;
}

ExtendedReal mutual_deficiency(const ParametrizedModel& M1, const ParametrizedModel& M2,
                               const CandidateMapSet& cands12, const CandidateMapSet& cands21,
                               const Divergence& D) {
  const ExtendedReal a = deficiency(M1, M2, cands12, D).value;
  const ExtendedReal b = deficiency(M2, M1, cands21, D).value;
  return a < b ? b : a;
}

namespace {

bool covers(const std::vector<Point>& a, const std::vector<Point>& b, double tol) {
  for (const Point& p : a) {
    bool hit = false;
    for (const Point& q : b)
      if (p.ambient() == q.ambient() && distance(p, q) <= tol) {
        hit = true;
        break;
      }
    if (!hit) return false;
  }
  return true;
}

std::optional<std::size_t> find_image_map(const ParametrizedModel& from,
                                          const ParametrizedModel& to,
                                          const CandidateMapSet& cands, double tol) {
  for (std::size_t c = 0; c < cands.size(); ++c) {
    std::vector<Point> imgs;
    try {
      for (const Point& p : from.images) imgs.push_back(cands[c].map(p));
    } catch (const Error&) {
      continue;
    }
    if (covers(imgs, to.images, tol) && covers(to.images, imgs, tol)) return c;
  }
  return std::nullopt;
}

}  // namespace

EquivalenceResult equivalence_check(const ParametrizedModel& M1, const ParametrizedModel& M2,
                                    const CandidateMapSet& cands12,
                                    const CandidateMapSet& cands21, double tol) {
  EquivalenceResult r;
  r.forward = find_image_map(M1, M2, cands12, tol);
  r.backward = find_image_map(M2, M1, cands21, tol);
  r.equivalent = r.forward.has_value() && r.backward.has_value();
  return r;
}

// ---------------------------------------------------------------------------
// convex closure

namespace {

/// Phase-one simplex for { w >= 0 : M w = r } with Bland's rule.
/// Returns a basic feasible w when min sum of artificials is <= tol.
std::optional<Eigen::VectorXd> phase_one(const Eigen::MatrixXd& M, const Eigen::VectorXd& r,
                                         double tol) {
  const Eigen::Index m = M.rows(), n = M.cols();
  // tableau [M I | r] with rows sign-normalised so r >= 0
  Eigen::MatrixXd tab = Eigen::MatrixXd::Zero(m + 1, n + m + 1);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double s = r(i) < 0.0 ? -1.0 : 1.0;
    tab.row(i).head(n) = s * M.row(i);
    tab(i, n + i) = 1.0;
    tab(i, n + m) = s * r(i);
  }
  // reduced costs of sum(artificials)
  for (Eigen::Index i = 0; i < m; ++i) tab.row(m) -= tab.row(i);
  for (Eigen::Index i = 0; i < m; ++i) tab(m, n + i) = 0.0;
  std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) basis[static_cast<std::size_t>(i)] = n + i;

  const double eps = 1e-12;
  const Eigen::Index max_iter = 50 * (n + m) + 100;
  for (Eigen::Index it = 0; it < max_iter; ++it) {
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < n + m; ++j)
      if (tab(m, j) < -eps) {
        enter = j;
        break;
      }
    if (enter < 0) break;
    Eigen::Index leave = -1;
    double best = kInf;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (tab(i, enter) <= eps) continue;
      const double ratio = tab(i, n + m) / tab(i, enter);
      if (ratio < best - 1e-15 ||
          (std::abs(ratio - best) <= 1e-15 && leave >= 0 &&
           basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
        best = ratio;
        leave = i;
      }
    }
    if (leave < 0) break;  // unbounded cannot happen in phase one
    tab.row(leave) /= tab(leave, enter);
    for (Eigen::Index i = 0; i <= m; ++i)
      if (i != leave && tab(i, enter) != 0.0) tab.row(i) -= tab(i, enter) * tab.row(leave);
    basis[static_cast<std::size_t>(leave)] = enter;
  }
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  double art = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index b = basis[static_cast<std::size_t>(i)];
    if (b < n)
      w(b) = tab(i, n + m);
    else
      art += tab(i, n + m);
  }
  if (art > tol) return std::nullopt;
  return w;
}

}  // namespace

ConvexHull::ConvexHull(std::vector<Point> points, std::optional<Ambient> ambient)
    : points_(std::move(points)), ambient_(ambient) {
  if (!points_.empty()) {
    if (!ambient_) ambient_ = points_.front().ambient();
    for (const Point& p : points_) require_ambient(p, *ambient_, "convex hull");
  }
}

std::optional<Eigen::VectorXd> ConvexHull::weights(const Point& x, double tol) const {
  if (points_.empty()) return std::nullopt;
  require_ambient(x, *ambient_, "convex hull membership");
  const Eigen::Index cd = ambient_->coordinate_dim();
  const Eigen::Index n = static_cast<Eigen::Index>(points_.size());
  Eigen::MatrixXd M(cd + 1, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    M.col(j).head(cd) = coords(points_[static_cast<std::size_t>(j)]);
    M(cd, j) = 1.0;
  }
  Eigen::VectorXd r(cd + 1);
  r.head(cd) = coords(x);
  r(cd) = 1.0;
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  auto w = phase_one(M, r, tol * scale);
  if (!w) return std::nullopt;
  if ((M * *w - r).lpNorm<Eigen::Infinity>() > tol * scale) return std::nullopt;
  return w;
}

std::vector<Point> ConvexHull::extreme_points() const {
  std::vector<Point> uniq;
  for (const Point& p : points_) {
    bool dup = false;
    for (const Point& q : uniq)
      if (distance(p, q) <= 1e-12) dup = true;
    if (!dup) uniq.push_back(p);
  }
  if (uniq.size() <= 1) return uniq;
  std::vector<Point> out;
  for (std::size_t i = 0; i < uniq.size(); ++i) {
    std::vector<Point> others;
    for (std::size_t j = 0; j < uniq.size(); ++j)
      if (j != i) others.push_back(uniq[j]);
    if (!ConvexHull(others, ambient_).membership(uniq[i])) out.push_back(uniq[i]);
  }
  return out;
}

ConvexHull convex_closure(const std::vector<Point>& points) { return ConvexHull(points); }

MonadLawReport check_monad_laws(const std::vector<Point>& points, int probes, std::uint64_t seed) {
  MonadLawReport rep;
  const ConvexHull hull(points);
  if (points.empty()) {
    rep.unit = rep.multiplication = rep.idempotence = true;
    return rep;
  }
  rep.unit = std::all_of(points.begin(), points.end(),
                         [&](const Point& p) { return hull.membership(p); });
  Rng rng(seed);
  const Ambient amb = points.front().ambient();
  const auto combo = [&]() {
    Eigen::VectorXd w = rng.positive_vector(static_cast<Eigen::Index>(points.size()));
    w /= w.sum();
    Point c = zero_like(points.front());
    for (std::size_t i = 0; i < points.size(); ++i) c += w(static_cast<Eigen::Index>(i)) * points[i];
    return c;
  };
  double spread = 0.0;
  for (const Point& p : points) spread = std::max(spread, distance(p, points.front()));
  spread = std::max(spread, 1e-3);

  std::vector<Point> enlarged = points;
  for (int k = 0; k < 10; ++k) enlarged.push_back(combo());
  const ConvexHull hull2(enlarged);
  const ConvexHull hull3(hull.extreme_points(), amb);

  bool mult = true, idem = true;
  for (int k = 0; k < probes; ++k) {
    Point p = combo();
    if (k % 2 == 1) {
      const Point noise = from_coords(rng.normal_vector(amb.coordinate_dim()), amb);
      p += (0.3 * spread) * noise;
    }
    const bool in1 = hull.membership(p);
    if (in1 != hull2.membership(p)) {
      mult = false;
      ++rep.mismatches;
    }
    if (in1 != hull3.membership(p)) {
      idem = false;
      ++rep.mismatches;
    }
    ++rep.probes;
  }
  rep.multiplication = mult;
  rep.idempotence = idem;
  return rep;
}

}  // namespace bregman
