#include "bregman/resources.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>

namespace bregman {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTol = 1e-8;

std::string describe_point(const Point& p) {
  const Eigen::VectorXd c = coords(p);
  std::string s = "(";
  char buf[32];
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.6g", c(i));
    s += (i ? ", " : "") + std::string(buf);
  }
  return s + ")";
}

ExtendedReal finite_min(const std::vector<Point>& pts,
                        const std::function<ExtendedReal(const Point&)>& f) {
  ExtendedReal best = ExtendedReal::infinity();
  for (const Point& p : pts) {
    const ExtendedReal v = f(p);
    if (v < best) best = v;
  }
  return best;
}

/// Members of the free set, mapped back to states.
std::vector<Point> free_samples(const ResourceTheory& t, int count, std::uint64_t seed) {
  const FreeSet& S = t.free_set;
  if (S.is_finite()) return S.points;
  std::vector<Point> out;
  if (S.set) {
    for (const Point& z : sample_members(*S.set, count, seed)) {
      try {
        out.push_back(t.spec ? t.spec->embedding.inverse(z) : z);
      } catch (const DomainError&) {
      }
    }
    return out;
  }
  if (!t.spec) throw ArgumentError("resource theory: dual free set needs a spec");
  for (const Point& y : sample_members(*S.dual, count, seed)) {
    try {
      out.push_back(t.spec->embedding.inverse(t.spec->potential.conjugate_grad(y)));
    } catch (const DomainError&) {
    }
  }
  return out;
}

Map compose(const Map& outer, const Map& inner) {
  return [outer, inner](const Point& x) { return outer(inner(x)); };
}

void check_theory_or_throw(const ResourceTheory& t, int pairs, std::uint64_t seed) {
  const TheoryCheck c = validate(t, pairs, seed);
  if (c.stability_violations)
    throw ConstructionError("resource theory: operations leave the free set (defect " +
                            std::to_string(c.max_stability_defect) + ")");
  if (c.monotone_violations)
    throw ConstructionError("resource theory: monotone increases by " +
                            std::to_string(c.max_monotone_excess) +
                            (c.witness ? " at " + describe_point(*c.witness) : std::string()));
}

std::vector<Monotone> default_monotones(const ResourceTheory& t) {
  std::vector<Monotone> ms;
  const bool left_ok = t.free_set.is_finite() || (t.free_set.set && t.spec);
  const bool right_ok = t.free_set.is_finite() || (t.free_set.dual && t.spec);
  // monotones capture a copy of the theory without monotones (no cycle)
  ResourceTheory base = t;
  base.monotones.clear();
  auto shared = std::make_shared<const ResourceTheory>(std::move(base));
  if (left_ok)
    ms.push_back({"left", [shared](const Point& x) {
                    auto v = monotone_left(*shared, x);
                    if (!v) throw ArgumentError("monotone_left: unsupported");
                    return *v;
                  }});
  if (right_ok)
    ms.push_back({"right", [shared](const Point& x) {
                    auto v = monotone_right(*shared, x);
                    if (!v) throw ArgumentError("monotone_right: unsupported");
                    return *v;
                  }});
  return ms;
}

}  // namespace

double FreeSet::defect(const Point& x, const std::optional<DivergenceSpec>& spec) const {
  if (set) {
    try {
      return set->violation(spec ? spec->embedding.forward(x) : x);
    } catch (const DomainError&) {
      return kInf;
    }
  }
  if (dual) {
    if (!spec) throw ArgumentError("free set: dual description needs a spec");
    try {
      return dual->violation(spec->potential.grad(spec->embedding.forward(x)));
    } catch (const DomainError&) {
      return kInf;
    }
  }
  double best = kInf;
  for (const Point& p : points)
    if (p.ambient() == x.ambient()) best = std::min(best, distance(p, x));
  return best;
}

std::string to_string(TheoryKind k) {
  switch (k) {
    case TheoryKind::I: return "i";
    case TheoryKind::II: return "ii";
    case TheoryKind::III: return "iii";
  }
  return "?";
}

std::optional<ExtendedReal> monotone_left(const ResourceTheory& t, const Point& phi) {
  const FreeSet& S = t.free_set;
  if (S.is_finite())
    return finite_min(S.points, [&](const Point& s) { return t.divergence(s, phi); });
  if (!S.set || !t.spec) return std::nullopt;
  const ProjectionResult r = left_project(*t.spec, *S.set, phi);
  if (r.status == ProjectionStatus::Empty) return ExtendedReal::infinity();
  if (!r.ok()) return std::nullopt;
  return embedded_divergence(*t.spec, r.point, phi);
}

std::optional<ExtendedReal> monotone_right(const ResourceTheory& t, const Point& phi) {
  const FreeSet& S = t.free_set;
  if (S.is_finite())
    return finite_min(S.points, [&](const Point& s) { return t.divergence(phi, s); });
  if (!S.dual || !t.spec) return std::nullopt;
  const ProjectionResult r = right_project(*t.spec, *S.dual, phi);
  if (r.status == ProjectionStatus::Empty) return ExtendedReal::infinity();
  if (!r.ok()) return std::nullopt;
  return embedded_divergence(*t.spec, phi, r.point);
}

TheoryCheck validate(const ResourceTheory& t, int pairs, std::uint64_t seed) {
  if (t.operations.empty()) throw ArgumentError("validate: theory has no operations");
  if (!t.sampler) throw ArgumentError("validate: theory has no state sampler");
  TheoryCheck c;
  Rng rng(seed);
  const std::size_t nops = t.operations.size();
  const auto pick = [&]() -> Map {
    const int a = rng.uniform_int(0, static_cast<int>(nops) - 1);
    if (rng.uniform() < 0.5) return t.operations[static_cast<std::size_t>(a)].map;
    const int b = rng.uniform_int(0, static_cast<int>(nops) - 1);
    return compose(t.operations[static_cast<std::size_t>(a)].map,
                   t.operations[static_cast<std::size_t>(b)].map);
  };

  // stability on free members
  const std::vector<Point> members = free_samples(t, std::min(pairs, 50), rng.next_seed());
  for (std::size_t i = 0; i < members.size(); ++i) {
    const Map T = pick();
    const double d = t.free_set.defect(T(members[i]), t.spec);
    c.max_stability_defect = std::max(c.max_stability_defect, d);
    if (!(d <= kTol)) {
      ++c.stability_violations;
      if (!c.witness) c.witness = members[i];
    }
  }

  // monotone decrease on fresh states
  for (int k = 0; k < pairs; ++k) {
    const Point phi = t.sampler(rng);
    const Map T = pick();
    const Point tphi = T(phi);
    ++c.pairs;
    for (const Monotone& m : t.monotones) {
      const ExtendedReal before = m.eval(phi);
      if (before.is_infinite()) continue;
      const ExtendedReal after = m.eval(tphi);
      const double excess = after.is_finite() ? after.value() - before.value() : kInf;
      if (excess > c.max_monotone_excess) c.max_monotone_excess = excess;
      if (!(excess <= kTol)) {
        ++c.monotone_violations;
        if (!c.witness) c.witness = phi;
      }
    }
  }
  return c;
}

ResourceTheory build_theory_i(CandidateMapSet ops, FreeSet S, Divergence D,
                              std::optional<DivergenceSpec> spec, StateSampler sampler,
                              int cert_samples, std::uint64_t seed) {
  if (!sampler) throw ArgumentError("build_theory_i: a state sampler is required");
  if (!S.is_finite() && !spec)
    throw ArgumentError("build_theory_i: a constraint free set needs a spec");
  if (std::none_of(ops.begin(), ops.end(), [](const CandidateMap& m) { return m.name == "identity"; }))
    ops.push_back({"identity", [](const Point& x) { return x; }, MapClass::CN});

  Rng rng(seed);
  std::vector<Point> samples;
  for (int i = 0; i < cert_samples; ++i) samples.push_back(sampler(rng));
  for (const CandidateMap& op : ops) {
    const CertificateReport rep = certify_class(op.map, samples, {}, D, MapClass::CN);
    if (!rep.pass) {
      std::string w;
      if (rep.witness)
        w = " witness pair " + describe_point(rep.witness->first) + ", " +
            describe_point(rep.witness->second);
      throw ConstructionError("build_theory_i: operation '" + op.name +
                              "' is not CN (violation " + std::to_string(rep.max_violation) +
                              ")" + w);
    }
  }

  ResourceTheory t;
  t.kind = TheoryKind::I;
  t.operations = std::move(ops);
  t.free_set = std::move(S);
  t.spec = std::move(spec);
  t.divergence = std::move(D);
  t.sampler = std::move(sampler);

  // stability, per operation so the error can name it
  const std::vector<Point> members = free_samples(t, 50, rng.next_seed());
  for (const CandidateMap& op : t.operations)
    for (const Point& s : members)
      if (!(t.free_set.defect(op.map(s), t.spec) <= kTol))
        throw ConstructionError("build_theory_i: operation '" + op.name +
                                "' leaves the free set at " + describe_point(s));

  t.monotones = default_monotones(t);
  t.side = t.free_set.set || t.free_set.is_finite() ? Side::Left : Side::Right;
  check_theory_or_throw(t, 100, rng.next_seed());
  return t;
}

ResourceTheory build_theory_ii(CandidateMapSet ops, std::vector<Point> fixed_candidates,
                               Divergence D, std::optional<DivergenceSpec> spec,
                               StateSampler sampler, int cert_samples, std::uint64_t seed) {
  if (ops.empty()) throw ArgumentError("build_theory_ii: no operations");
  if (!sampler) throw ArgumentError("build_theory_ii: a state sampler is required");
  MapClass cls = MapClass::Unclassified;
  for (const CandidateMap& op : ops) {
    if (op.cls != MapClass::LSQ && op.cls != MapClass::RSQ)
      throw ArgumentError("build_theory_ii: operation '" + op.name + "' is not declared LSQ/RSQ");
    if (cls != MapClass::Unclassified && op.cls != cls)
      throw ArgumentError("build_theory_ii: operations mix LSQ and RSQ");
    cls = op.cls;
  }

  std::vector<Point> common;
  for (const Point& p : fixed_candidates) {
    bool fixed = true;
    for (const CandidateMap& op : ops) {
      try {
        if (distance(op.map(p), p) > 1e-9) fixed = false;
      } catch (const DomainError&) {
        fixed = false;
      }
      if (!fixed) break;
    }
    if (fixed) common.push_back(p);
  }
  if (common.empty()) throw ConstructionError("build_theory_ii: empty common fixed set");

  Rng rng(seed);
  std::vector<Point> samples;
  for (int i = 0; i < cert_samples; ++i) samples.push_back(sampler(rng));
  for (const CandidateMap& op : ops) {
    const CertificateReport rep = certify_class(op.map, samples, common, D, cls);
    if (!rep.pass)
      throw ConstructionError("build_theory_ii: operation '" + op.name + "' is not " +
                              to_string(cls) + " (violation " +
                              std::to_string(rep.max_violation) + ")");
  }

  ResourceTheory t;
  t.kind = TheoryKind::II;
  t.operations = std::move(ops);
  t.free_set = FreeSet::finite(common);
  t.spec = std::move(spec);
  t.divergence = D;
  t.sampler = std::move(sampler);
  t.side = cls == MapClass::LSQ ? Side::Left : Side::Right;
  t.notes.push_back("free set: verified fixed points (a subset of the asymptotic fixed points)");
  for (std::size_t i = 0; i < common.size(); ++i) {
    const Point p = common[i];
    if (cls == MapClass::LSQ)
      t.monotones.push_back({"D(p" + std::to_string(i) + ",.)",
                             [D, p](const Point& x) { return D(p, x); }});
    else
      t.monotones.push_back({"D(.,p" + std::to_string(i) + ")",
                             [D, p](const Point& x) { return D(x, p); }});
  }
  check_theory_or_throw(t, 100, rng.next_seed());
  return t;
}

ResourceTheory build_theory_iii(const ConstraintSet& K, const std::vector<ConstraintSet>& anchors,
                                const DivergenceSpec& spec, Side side, StateSampler sampler) {
  if (anchors.empty()) throw ArgumentError("build_theory_iii: no anchors");
  if (!sampler) throw ArgumentError("build_theory_iii: a state sampler is required");
  const ConstraintSet whole(K.ambient());
  ResourceTheory t;
  t.kind = TheoryKind::III;
  t.spec = spec;
  t.divergence = Divergence::from_spec(spec);
  t.side = side;
  t.sampler = std::move(sampler);
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    const SubsetResult r = subset_of(K, anchors[i]);
    if (r.verdict == Verdict::False)
      throw ConstructionError("build_theory_iii: K is not inside anchor " + std::to_string(i) +
                              (r.witness ? ", witness " + describe_point(*r.witness) : std::string()));
    HomMonoidElement e{ProjectionOperator(side, spec, anchors[i]), whole};
    t.anchors.push_back(e);
    const ProjectionOperator op = e.op;
    t.operations.push_back({"P_Q" + std::to_string(i), [op](const Point& x) { return op.apply(x); },
                            side == Side::Left ? MapClass::LSQ : MapClass::RSQ});
  }
  t.free_set = side == Side::Left ? FreeSet::of(K) : FreeSet{std::nullopt, K, {}};
  t.monotones = default_monotones(t);
  check_theory_or_throw(t, 20, 0);
  return t;
}

std::vector<Point> approximate_free_states(const CandidateMapSet& ops,
                                           const std::vector<Point>& grid, double tol) {
  std::vector<Point> out;
  if (grid.empty()) return out;
  for (const CandidateMap& op : ops) {
    const Point c = op.map(grid.front());
    bool reachable = true;
    for (std::size_t g = 1; g < grid.size() && reachable; ++g) {
      reachable = false;
      for (const CandidateMap& o2 : ops)
        if (distance(o2.map(grid[g]), c) <= tol) {
          reachable = true;
          break;
        }
    }
    if (!reachable) continue;
    if (std::none_of(out.begin(), out.end(), [&](const Point& q) { return distance(q, c) <= tol; }))
      out.push_back(c);
  }
  return out;
}

WitnessResult witnesses(const FreeSet& S, const std::vector<Point>& candidates, int budget,
                        std::uint64_t seed) {
  WitnessResult res;
  if (candidates.empty()) return res;
  std::vector<Point> xs = S.points;
  if (S.set) xs = sample_members(*S.set, budget, seed);
  for (const Point& y : candidates) {
    const Point* bad = nullptr;
    for (const Point& x : xs)
      if (inner(x, y) < -1e-9) {
        bad = &x;
        break;
      }
    if (bad)
      res.dropped.emplace_back(y, *bad);
    else
      res.kept.push_back(y);
  }
  return res;
}

EnvelopeReport convex_envelope_check(const std::vector<ResourceTheory>& theories,
                                     const std::vector<double>& weights,
                                     const std::vector<Point>& samples, const Point& phi) {
  if (theories.empty() || theories.size() != weights.size())
    throw ArgumentError("convex_envelope_check: one weight per theory required");
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w))
      throw ArgumentError("convex_envelope_check: weights must be positive");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw ArgumentError("convex_envelope_check: weights must sum to 1");
  for (const ResourceTheory& t : theories) {
    if (!t.spec) throw ArgumentError("convex_envelope_check: theories need a spec");
    if (!same_spec(*t.spec, *theories.front().spec))
      throw ArgumentError("convex_envelope_check: theories use different specs");
    if (t.operations.empty()) throw ArgumentError("convex_envelope_check: theory without operations");
    if (distance(t.operations.front().map(phi), phi) > 1e-9)
      throw ArgumentError("convex_envelope_check: phi is not a common fixed point");
  }
  const DivergenceSpec& spec = *theories.front().spec;

  EnvelopeReport rep;
  for (const Point& psi : samples) {
    double rhs = 0.0;
    Point z;
    for (std::size_t i = 0; i < theories.size(); ++i) {
      const Point ti = theories[i].operations.front().map(psi);
      rhs += weights[i] * embedded_divergence(spec, ti, phi).value_or(kInf);
      const Point li = weights[i] * spec.embedding.forward(ti);
      z = i == 0 ? li : z + li;
    }
    const double lhs = embedded_divergence(spec, spec.embedding.inverse(z), phi).value_or(kInf);
    const double margin = rhs - lhs;
    rep.margins.push_back(margin);
    rep.min_margin = std::min(rep.min_margin, margin);
  }
  rep.pass = samples.empty() || rep.min_margin >= -kTol;
  return rep;
}

std::vector<double> monotone_orbit(const ResourceTheory& t, std::size_t op, std::size_t monotone,
                                   const Point& phi, int steps) {
  if (op >= t.operations.size() || monotone >= t.monotones.size())
    throw ArgumentError("monotone_orbit: index out of range");
  std::vector<double> out;
  Point x = phi;
  for (int k = 0; k <= steps; ++k) {
    out.push_back(t.monotones[monotone].eval(x).value_or(kInf));
    if (k < steps) x = t.operations[op].map(x);
  }
  return out;
}

}  // namespace bregman
