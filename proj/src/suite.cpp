#include "bregman/suite.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "bregman/category.hpp"
#include "bregman/divergences.hpp"
#include "bregman/optimize.hpp"
#include "bregman/projections.hpp"
#include "bregman/quantum.hpp"
#include "bregman/random.hpp"
#include "bregman/resources.hpp"
#include "bregman/spectral.hpp"

namespace bregman::suite {

namespace {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

class Recorder {
 public:
  Recorder(int id, std::string name) {
    r_.id = id;
    r_.name = std::move(name);
  }
  /// err is the measured defect; ok decides the check.
  void check(bool ok, double err, const std::string& what) {
    ++r_.checks;
    if (std::isfinite(err)) r_.worst = std::max(r_.worst, err);
    else if (!ok) r_.worst = kInf;
    if (!ok) {
      ++r_.failures;
      if (r_.details.size() < 5) {
        char buf[64];
        std::snprintf(buf, sizeof buf, " (%.6g)", err);
        r_.details.push_back(what + buf);
      }
    }
  }
  /// Exceptions count as failures with the message recorded.
  template <class F>
  void guarded(const std::string& what, F&& f) {
    try {
      f();
    } catch (const std::exception& e) {
      check(false, kInf, what + ": " + e.what());
    }
  }
  CriterionResult result() { return std::move(r_); }

 private:
  CriterionResult r_;
};

std::string tag(const std::string& family, int k) { return family + "#" + std::to_string(k); }

MatrixXd kernel_basis(const MatrixXd& A, Index n) {
  if (A.rows() == 0) return MatrixXd::Identity(n, n);
  Eigen::JacobiSVD<MatrixXd> svd(A, Eigen::ComputeFullV);
  Index rank = 0;
  for (Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > 1e-10 * std::max(1.0, svd.singularValues()(0))) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

MatrixXd pinv_rows(const MatrixXd& A) {
  return Eigen::CompleteOrthogonalDecomposition<MatrixXd>(A).pseudoInverse();
}

Point random_pd(Rng& rng, Index side) {
  const MatrixXcd G = rng.ginibre(side, side);
  MatrixXcd m = G * G.adjoint() / static_cast<double>(side);
  m += 0.05 * MatrixXcd::Identity(side, side);
  return Point(spectral::hermitian_part(m));
}

Point random_density_point(Rng& rng, Index side, Index rank) {
  return quantum::random_density(side, rank, rng).point();
}

Point hermitian_point(Rng& rng, Index side, double scale = 1.0) {
  return Point(MatrixXcd(scale * rng.hermitian(side)));
}

Point vec(const VectorXd& v) { return Point(v); }

VectorXd stochastic_apply(const MatrixXd& K, const VectorXd& x) { return K * x; }

MatrixXd random_stochastic(Rng& rng, Index n) {
  MatrixXd K(n, n);
  for (Index j = 0; j < n; ++j) K.col(j) = rng.probability_vector(n);
  return K;
}

SolveConfig tight() {
  SolveConfig c;
  c.residual_tol = 1e-12;
  c.max_cycles = 200000;
  return c;
}

/// Euclidean projection onto {E x = f, G x <= h} by active-set enumeration
/// with KKT checks.  Only for small inequality counts.
std::optional<VectorXd> qp_projection(const VectorXd& y, const MatrixXd& E, const VectorXd& f,
                                      const MatrixXd& G, const VectorXd& h) {
  const Index n = y.size(), mi = G.rows();
  std::optional<VectorXd> best;
  double best_d = kInf;
  for (unsigned mask = 0; mask < (1u << mi); ++mask) {
    std::vector<Index> act;
    for (Index i = 0; i < mi; ++i)
      if (mask & (1u << i)) act.push_back(i);
    const Index m = E.rows() + static_cast<Index>(act.size());
    if (m > n) continue;
    MatrixXd A(m, n);
    VectorXd c(m);
    A.topRows(E.rows()) = E;
    c.head(E.rows()) = f;
    for (std::size_t k = 0; k < act.size(); ++k) {
      A.row(E.rows() + static_cast<Index>(k)) = G.row(act[k]);
      c(E.rows() + static_cast<Index>(k)) = h(act[k]);
    }
    VectorXd x = y;
    VectorXd lambda(m);
    if (m > 0) {
      const MatrixXd AAt = A * A.transpose();
      Eigen::FullPivLU<MatrixXd> lu(AAt);
      if (lu.rank() < m) continue;
      lambda = lu.solve(A * y - c);
      x = y - A.transpose() * lambda;
    }
    bool ok = true;
    for (std::size_t k = 0; k < act.size() && ok; ++k)
      if (lambda(E.rows() + static_cast<Index>(k)) < -1e-12) ok = false;
    if (mi > 0 && ok && ((G * x - h).array() > 1e-10).any()) ok = false;
    if (!ok) continue;
    const double d = (x - y).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = x;
    }
  }
  return best;
}

/// min over t of D(y, grad Psi*(m0 + N t)) by BFGS: the right projection
/// onto grad Psi*(M) computed without conjugation.
Point right_oracle(const Potential& psi, const Point& y, const VectorXd& m0, const MatrixXd& N,
                   Rng& rng) {
  const Ambient amb = psi.ambient();
  const auto to_state = [&](const VectorXd& t) {
    return psi.conjugate_grad(from_coords(m0 + N * t, amb));
  };
  const optimize::Objective f = [&](const VectorXd& t) {
    return bregman_divergence(psi, y, to_state(t)).value_or(kInf);
  };
  optimize::Options opt;
  opt.grad_tol = 1e-11;
  optimize::Result best;
  best.value = kInf;
  for (int r = 0; r < 3; ++r) {
    const VectorXd t0 = r == 0 ? VectorXd::Zero(N.cols()) : VectorXd(0.3 * rng.normal_vector(N.cols()));
    optimize::Result res = optimize::bfgs(f, t0, opt);
    if (res.value < best.value) best = std::move(res);
  }
  return to_state(best.x);
}

}  // namespace

// ---------------------------------------------------------------------------
// 1

CriterionResult divergence_axioms(std::uint64_t seed) {
  Recorder rec(1, "divergence axioms");
  Rng rng(seed + 101);
  struct Family {
    std::string name;
    std::function<Point(Rng&)> sample;
    Divergence D;
  };
  std::vector<Family> fams;
  fams.push_back({"euclidean", [](Rng& r) { return vec(2.0 * r.normal_vector(5)); },
                  Divergence::from_spec(DivergenceSpec(Potential::euclidean(5)))});
  fams.push_back({"kl", [](Rng& r) { return vec(r.positive_vector(5)); },
                  Divergence::from_spec(DivergenceSpec(Potential::negative_entropy(5)))});
  for (double beta : {0.3, 0.5, 0.7})
    fams.push_back({"power_gauge", [](Rng& r) { return vec(r.normal_vector(4)); },
                    Divergence::from_spec(DivergenceSpec(Potential::power_gauge(beta, 4)))});
  const OrliczFunction cube = OrliczFunction::power(3.0);
  fams.push_back({"orlicz", [](Rng& r) { return vec(r.normal_vector(3)); },
                  Divergence{"orlicz", [cube](const Point& a, const Point& b) {
                               return orlicz_divergence(cube, Gauge::linear(), a.vec(), b.vec());
                             }}});
  for (Index side : {2, 3})
    fams.push_back({"umegaki",
                    [side](Rng& r) {
                      return random_density_point(r, side, r.uniform_int(1, static_cast<int>(side)));
                    },
                    Divergence::umegaki()});
  for (double g : {0.25, 0.5, 0.75})
    fams.push_back({"d_gamma", [](Rng& r) { return random_density_point(r, 3, 3); },
                    Divergence::gamma(g)});
  for (double b : {0.5, 0.7})
    fams.push_back({"d_gamma_beta", [](Rng& r) { return random_density_point(r, 2, 2); },
                    Divergence::gamma_beta(0.5, b)});

  for (const Family& f : fams)
    for (int k = 0; k < 1000; ++k)
      rec.guarded(tag(f.name, k), [&] {
        const Point a = f.sample(rng), b = f.sample(rng);
        const ExtendedReal v = f.D(a, b);
        const double neg = v.is_finite() ? -v.value() : -kInf;
        rec.check(!(neg > 1e-9), std::max(neg, 0.0), tag(f.name + " negative", k));
        const ExtendedReal s = f.D(a, a);
        const double self = s.value_or(kInf);
        rec.check(std::abs(self) <= 1e-9, std::abs(self), tag(f.name + " self", k));
      });
  return rec.result();
}

// ---------------------------------------------------------------------------
// 2

CriterionResult legendre_machinery(std::uint64_t seed) {
  Recorder rec(2, "legendre machinery");
  Rng rng(seed + 202);
  struct Item {
    std::string name;
    Potential psi;
    std::function<Point(Rng&)> x, y;
  };
  std::vector<Item> items;
  items.push_back({"euclidean", Potential::euclidean(5), [](Rng& r) { return vec(2.0 * r.normal_vector(5)); },
                   [](Rng& r) { return vec(2.0 * r.normal_vector(5)); }});
  items.push_back({"negative_entropy", Potential::negative_entropy(5),
                   [](Rng& r) { return vec(r.positive_vector(5)); },
                   [](Rng& r) { return vec(r.normal_vector(5)); }});
  for (double beta : {0.3, 0.5, 0.7})
    items.push_back({"power_gauge", Potential::power_gauge(beta, 4),
                     [](Rng& r) { return vec(r.normal_vector(4)); },
                     [](Rng& r) { return vec(r.normal_vector(4)); }});
  items.push_back({"orlicz_gauge", Potential::orlicz_gauge(OrliczFunction::power(3.0), Gauge::linear(), 3),
                   [](Rng& r) { return vec(r.normal_vector(3)); },
                   [](Rng& r) { return vec(r.normal_vector(3)); }});
  items.push_back({"von_neumann", Potential::spectral_von_neumann(3),
                   [](Rng& r) { return random_pd(r, 3); },
                   [](Rng& r) { return hermitian_point(r, 3); }});
  items.push_back({"spectral_power", Potential::spectral_power(0.5, 0.5, 2),
                   [](Rng& r) { return hermitian_point(r, 2); },
                   [](Rng& r) { return hermitian_point(r, 2); }});

  for (const Item& it : items)
    for (int k = 0; k < 1000; ++k)
      rec.guarded(tag(it.name, k), [&] {
        const Point x = it.x(rng);
        const Point g = it.psi.grad(x);
        const Point back = it.psi.conjugate_grad(g);
        const double rt = distance(back, x) / std::max(1.0, norm(x));
        rec.check(rt <= 1e-8, rt, tag(it.name + " round trip", k));

        const double px = it.psi.eval(x).value();
        const double pg = it.psi.conjugate_eval(g).value();
        const double scale = std::max(1.0, std::abs(px) + std::abs(pg));
        const double eq = std::abs(px + pg - inner(x, g)) / scale;
        rec.check(eq <= 1e-8, eq, tag(it.name + " fenchel-young equality", k));

        const Point y = it.y(rng);
        const double py = it.psi.conjugate_eval(y).value_or(kInf);
        const double gap = (px + py - inner(x, y)) / std::max(1.0, std::abs(px) + std::abs(py));
        rec.check(gap >= -1e-9, std::max(0.0, -gap), tag(it.name + " fenchel-young gap", k));
      });
  return rec.result();
}

// ---------------------------------------------------------------------------
// 3

CriterionResult pythagorean_identities(std::uint64_t seed) {
  Recorder rec(3, "pythagorean identities");
  Rng rng(seed + 303);
  const SolveConfig cfg = tight();

  const DivergenceSpec eu(Potential::euclidean(6));
  const DivergenceSpec kl(Potential::negative_entropy(6));
  const DivergenceSpec vn(Potential::spectral_von_neumann(3));
  const Ambient a6 = Ambient::vector(6);

  const auto affine_check = [&](const DivergenceSpec& spec, const ConstraintSet& target,
                                const Point& x, const Point& y, const std::string& what) {
    const double r = pythagorean_residual(spec, target, x, y, Side::Left, cfg);
    rec.check(std::abs(r) <= 1e-7, std::abs(r), what);
  };
  const auto convex_check = [&](const DivergenceSpec& spec, const ConstraintSet& target,
                                const Point& x, const Point& y, const std::string& what) {
    const double r = pythagorean_residual(spec, target, x, y, Side::Left, cfg);
    rec.check(r >= -1e-7, std::max(0.0, -r), what);
  };

  for (int k = 0; k < 50; ++k)
    rec.guarded(tag("euclidean affine", k), [&] {
      const int m = rng.uniform_int(1, 3);
      const MatrixXd A = MatrixXd(rng.normal_vector(m * 6).reshaped(m, 6));
      const VectorXd x0 = rng.normal_vector(6);
      const ConstraintSet T = ConstraintSet::affine(a6, A, A * x0);
      const VectorXd x = x0 + kernel_basis(A, 6) * rng.normal_vector(6 - m);
      affine_check(eu, T, vec(x), vec(3.0 * rng.normal_vector(6)), tag("euclidean affine", k));
    });

  for (int k = 0; k < 50; ++k)
    rec.guarded(tag("kl affine", k), [&] {
      const int m = rng.uniform_int(1, 3);
      MatrixXd A = MatrixXd(rng.normal_vector(m * 6).reshaped(m, 6));
      if (k % 2 == 0) A.row(0).setOnes();
      const VectorXd x0 = rng.positive_vector(6, 0.5);
      const ConstraintSet T = ConstraintSet::affine(a6, A, A * x0);
      VectorXd d = kernel_basis(A, 6) * rng.normal_vector(6 - m);
      d *= 0.5 * x0.minCoeff() / d.cwiseAbs().maxCoeff();
      affine_check(kl, T, vec(x0 + d), vec(rng.positive_vector(6)), tag("kl affine", k));
    });

  for (int k = 0; k < 50; ++k)
    rec.guarded(tag("von neumann affine", k), [&] {
      const Point x0 = random_density_point(rng, 3, 3);
      const MatrixXcd H = rng.hermitian(3);
      const double e = (H * x0.mat()).trace().real();
      const ConstraintSet T = k % 3 == 0 ? ConstraintSet::spectral_trace(3, 1.0)
                                         : intersect(ConstraintSet::spectral_trace(3, 1.0),
                                                     ConstraintSet::spectral_expectation(H, e));
      affine_check(vn, T, x0, random_pd(rng, 3), tag("von neumann affine", k));
    });

  // convex targets: inequality only
  for (int k = 0; k < 15; ++k)
    rec.guarded(tag("euclidean convex", k), [&] {
      ConstraintSet T(a6);
      switch (k % 3) {
        case 0: T = ConstraintSet::box(VectorXd::Constant(6, -1.0), VectorXd::Constant(6, 1.0)); break;
        case 1: T = ConstraintSet::norm_ball(a6, 2.0, 1.0); break;
        default: T = ConstraintSet::halfspace(a6, rng.normal_vector(6), rng.uniform(0.0, 1.0));
      }
      const Point y = vec(3.0 * rng.normal_vector(6));
      for (const Point& x : sample_members(T, 4, rng.next_seed()))
        convex_check(eu, T, x, y, tag("euclidean convex", k));
    });
  for (int k = 0; k < 10; ++k)
    rec.guarded(tag("kl convex", k), [&] {
      const ConstraintSet T =
          k % 2 == 0 ? ConstraintSet::box(VectorXd::Constant(6, 0.1), VectorXd::Constant(6, 2.0))
                     : intersect(ConstraintSet::simplex(6),
                                 ConstraintSet::halfspace(a6, rng.normal_vector(6), 0.2));
      const Point y = vec(rng.positive_vector(6));
      for (const Point& x : sample_members(T, 4, rng.next_seed()))
        convex_check(kl, T, x, y, tag("kl convex", k));
    });
  for (int k = 0; k < 5; ++k)
    rec.guarded(tag("von neumann convex", k), [&] {
      const Ambient m2 = Ambient::matrix(2);
      const DivergenceSpec vn2(Potential::spectral_von_neumann(2));
      const Point c = hermitian_point(rng, 2);
      const ConstraintSet T =
          intersect(ConstraintSet::spectral_simplex(2), ConstraintSet::halfspace(m2, coords(c), 0.1));
      const Point y = random_pd(rng, 2);
      for (const Point& x : sample_members(T, 3, rng.next_seed()))
        convex_check(vn2, T, x, y, tag("von neumann convex", k));
    });
  return rec.result();
}

// ---------------------------------------------------------------------------
// 4

CriterionResult diamond_composition(std::uint64_t seed) {
  Recorder rec(4, "diamond composition");
  Rng rng(seed + 404);
  const SolveConfig cfg = tight();
  const Ambient a4 = Ambient::vector(4);
  const DivergenceSpec eu(Potential::euclidean(4));

  for (int k = 0; k < 50; ++k)
    rec.guarded(tag("euclidean dykstra", k), [&] {
      const VectorXd y = 3.0 * rng.normal_vector(4);
      std::vector<ConstraintSet> Q;
      MatrixXd E(0, 4), G(0, 4);
      VectorXd f(0), h(0);
      if (k % 2 == 0) {
        const VectorXd a1 = rng.normal_vector(4), a2 = rng.normal_vector(4);
        const double c1 = rng.uniform(0.0, 1.0), c2 = rng.uniform(0.0, 1.0);
        Q = {ConstraintSet::halfspace(a4, a1, c1), ConstraintSet::halfspace(a4, a2, c2)};
        G.resize(2, 4);
        G << a1.transpose(), a2.transpose();
        h.resize(2);
        h << c1, c2;
      } else {
        const VectorXd a = rng.normal_vector(4), x0 = rng.uniform_vector(4, -0.5, 0.5);
        Q = {ConstraintSet::box(VectorXd::Constant(4, -1.0), VectorXd::Constant(4, 1.0)),
             ConstraintSet::hyperplane(a4, a, a.dot(x0))};
        E = a.transpose();
        f = VectorXd::Constant(1, a.dot(x0));
        G.resize(8, 4);
        G << MatrixXd::Identity(4, 4), -MatrixXd::Identity(4, 4);
        h = VectorXd::Ones(8);
      }
      const ProjectionResult d = left_project_dykstra(eu, Q, vec(y), cfg);
      const auto oracle = qp_projection(y, E, f, G, h);
      if (!oracle) throw Error("oracle found no KKT point");
      const double gap = (d.point.vec() - *oracle).norm();
      rec.check(gap <= 1e-6, gap, tag("euclidean dykstra", k));
    });

  const Ambient a5 = Ambient::vector(5);
  const DivergenceSpec kl(Potential::negative_entropy(5));
  for (int k = 0; k < 20; ++k)
    rec.guarded(tag("kl dykstra", k), [&] {
      const VectorXd y = rng.positive_vector(5);
      std::vector<ConstraintSet> Q;
      if (k % 2 == 0) {
        const VectorXd p0 = rng.probability_vector(5), a = rng.normal_vector(5);
        Q = {ConstraintSet::simplex(5), ConstraintSet::hyperplane(a5, a, a.dot(p0))};
      } else {
        const VectorXd x0 = rng.positive_vector(5, 0.5);
        const VectorXd a1 = rng.normal_vector(5), a2 = rng.normal_vector(5);
        Q = {ConstraintSet::hyperplane(a5, a1, a1.dot(x0)), ConstraintSet::hyperplane(a5, a2, a2.dot(x0))};
      }
      const ProjectionResult d = left_project_dykstra(kl, Q, vec(y), cfg);
      const ProjectionResult direct = left_project_closed_form(kl, intersect(Q[0], Q[1]), vec(y));
      if (!direct.ok()) throw Error("no closed form for the intersection");
      const double gap = distance(d.point, direct.point);
      rec.check(gap <= 1e-6, gap, tag("kl dykstra", k));
    });

  const Ambient a6 = Ambient::vector(6);
  const DivergenceSpec eu6(Potential::euclidean(6));
  for (int k = 0; k < 10; ++k)
    rec.guarded(tag("kaczmarz", k), [&] {
      const MatrixXd A = MatrixXd(rng.normal_vector(18).reshaped(3, 6));
      const VectorXd b = rng.normal_vector(3), y = rng.normal_vector(6);
      const ProjectionResult r = cyclic_bregman_affine(eu6, AffineSystem{A, b}, vec(y), cfg);
      const VectorXd oracle = y + pinv_rows(A) * (b - A * y);
      const double gap = (r.point.vec() - oracle).norm();
      rec.check(gap <= 1e-6, gap, tag("kaczmarz", k));
    });
  for (int k = 0; k < 10; ++k)
    rec.guarded(tag("alternating subspaces", k), [&] {
      const MatrixXd A1 = MatrixXd(rng.normal_vector(12).reshaped(2, 6));
      const MatrixXd A2 = MatrixXd(rng.normal_vector(12).reshaped(2, 6));
      const VectorXd y = rng.normal_vector(6);
      const ProjectionResult r = left_project_dykstra(
          eu6, {ConstraintSet::affine(a6, A1, VectorXd::Zero(2)), ConstraintSet::affine(a6, A2, VectorXd::Zero(2))},
          vec(y), cfg);
      MatrixXd S(4, 6);
      S << A1, A2;
      const MatrixXd N = kernel_basis(S, 6);
      const VectorXd oracle = N * (N.transpose() * y);
      const double gap = (r.point.vec() - oracle).norm();
      rec.check(gap <= 1e-6, gap, tag("alternating subspaces", k));
    });
  return rec.result();
}

// ---------------------------------------------------------------------------
// 5

CriterionResult right_projection_identity(std::uint64_t seed) {
  Recorder rec(5, "right projection identity");
  Rng rng(seed + 505);
  const SolveConfig cfg = tight();
  struct Item {
    std::string name;
    Potential psi;
    std::function<Point(Rng&)> y;
    double m_scale;
  };
  std::vector<Item> items = {
      {"euclidean", Potential::euclidean(4), [](Rng& r) { return vec(2.0 * r.normal_vector(4)); }, 1.0},
      {"negative_entropy", Potential::negative_entropy(4), [](Rng& r) { return vec(r.positive_vector(4)); }, 0.5},
      {"power_gauge", Potential::power_gauge(0.4, 3), [](Rng& r) { return vec(r.normal_vector(3)); }, 1.0},
      {"von_neumann", Potential::spectral_von_neumann(2), [](Rng& r) { return random_pd(r, 2); }, 0.5},
  };
  for (const Item& it : items)
    for (int k = 0; k < 20; ++k)
      rec.guarded(tag(it.name, k), [&] {
        const Ambient amb = it.psi.ambient();
        const Index cd = amb.coordinate_dim();
        const int m = rng.uniform_int(1, static_cast<int>(cd) - 1);
        const MatrixXd A = MatrixXd(rng.normal_vector(m * cd).reshaped(m, cd));
        const VectorXd m0 = it.m_scale * rng.normal_vector(cd);
        const ConstraintSet M = ConstraintSet::affine(amb, A, A * m0);
        const Point y = it.y(rng);
        const DivergenceSpec spec(it.psi);
        const ProjectionResult r = right_project(spec, M, y, cfg);
        if (!r.ok()) throw Error("right projection unsupported");
        const Point o = right_oracle(it.psi, y, m0, kernel_basis(A, cd), rng);
        const double gap = distance(r.point, o);
        rec.check(gap <= 1e-5, gap, tag(it.name, k));
      });
  return rec.result();
}

// ---------------------------------------------------------------------------
// 6

CriterionResult quantum_verification(std::uint64_t seed) {
  Recorder rec(6, "quantum verification");
  Rng rng(seed + 606);
  using namespace quantum;
  const auto family = [&](Index d) {
    const MatrixXcd U = random_unitary(d, rng);
    std::vector<MatrixXcd> Ps = projectors_from_unitary(U);
    if (d == 3 && rng.uniform() < 0.5) Ps = {Ps[0] + Ps[1], Ps[2]};
    return Ps;
  };
  for (int k = 0; k < 20; ++k)
    rec.guarded(tag("lueders", k), [&] {
      const Index d = k % 2 == 0 ? 2 : 3;
      const DensityMatrix rho = random_density(d, rng.uniform_int(1, static_cast<int>(d)), rng);
      const OracleReport rep = verify_lueders(rho, family(d), rng.next_seed());
      rec.check(rep.gap <= 1e-5, rep.gap, tag("lueders", k));
    });
  for (int k = 0; k < 20; ++k)
    rec.guarded(tag("jeffrey", k), [&] {
      const Index d = k % 2 == 0 ? 2 : 3;
      const DensityMatrix rho = random_density(d, d, rng);
      const std::vector<MatrixXcd> Ps = family(d);
      const VectorXd p = rng.probability_vector(static_cast<Index>(Ps.size()), 0.5);
      const OracleReport rep =
          verify_jeffrey(rho, Ps, std::vector<double>(p.data(), p.data() + p.size()), rng.next_seed());
      rec.check(rep.gap <= 1e-5, rep.gap, tag("jeffrey", k));
    });
  for (int k = 0; k < 20; ++k)
    rec.guarded(tag("partial trace", k), [&] {
      const DensityMatrix rho = random_density(4, rng.uniform_int(1, 4), rng);
      const OracleReport rep = partial_trace_projection(rho, 2, 2, rng.next_seed());
      rec.check(rep.gap <= 1e-5, rep.gap, tag("partial trace", k));
    });
  return rec.result();
}

// ---------------------------------------------------------------------------
// 7

CriterionResult cptp_contraction(std::uint64_t seed) {
  Recorder rec(7, "cptp contraction of d_gamma");
  Rng rng(seed + 707);
  for (int k = 0; k < 1000; ++k)
    rec.guarded(tag("map", k), [&] {
      const quantum::KrausMap T = quantum::sample_cptp(2, rng.uniform_int(1, 4), rng.next_seed());
      for (double g : {0.25, 0.5, 0.75}) {
        const quantum::ContractionReport rep = quantum::cn_check_dgamma(T, g, 1, rng.next_seed());
        rec.check(rep.pass(), std::max(0.0, rep.max_violation), tag("map", k));
      }
    });
  return rec.result();
}

// ---------------------------------------------------------------------------
// 8

CriterionResult hom_monoid_laws(std::uint64_t seed) {
  Recorder rec(8, "hom-monoid laws");
  Rng rng(seed + 808);
  const Index n = 6;
  const Ambient amb = Ambient::vector(n);
  const DivergenceSpec spec(Potential::euclidean(n));
  const auto rows_through = [&](const VectorXd& x0, int m) {
    const MatrixXd A = MatrixXd(rng.normal_vector(m * n).reshaped(m, n));
    return ConstraintSet::affine(amb, A, A * x0);
  };
  for (int k = 0; k < 100; ++k)
    rec.guarded(tag("family", k), [&] {
      const VectorXd x0 = rng.normal_vector(n);
      const ConstraintSet Q = rows_through(x0, 1);
      std::vector<HomMonoidElement> e;
      for (int i = 0; i < 3; ++i)
        e.push_back(HomMonoidElement::make(spec, intersect(Q, rows_through(x0, rng.uniform_int(0, 1) + 1)), Q));
      const HomMonoidElement zero = HomMonoidElement::zero(spec, Q);
      const auto d = [](const HomMonoidElement& a, const HomMonoidElement& b) { return compose_diamond(a, b); };

      rec.check(same_target(d(e[0], e[1]), d(e[1], e[0])), 0.0, tag("commutativity", k));
      rec.check(same_target(d(d(e[0], e[1]), e[2]), d(e[0], d(e[1], e[2]))), 0.0, tag("associativity", k));
      rec.check(same_target(d(e[0], zero), e[0]), 0.0, tag("zero element", k));
      rec.check(same_target(d(e[0], e[0]), e[0]), 0.0, tag("idempotence", k));
      // e0 o e1 <= e0 implies (e0 o e1) o e2 <= e0 o e2
      const bool below = hom_order(d(e[0], e[1]), e[0]).verdict == Verdict::True;
      const bool compat = hom_order(d(d(e[0], e[1]), e[2]), d(e[0], e[2])).verdict == Verdict::True;
      rec.check(below && compat, 0.0, tag("order compatibility", k));
      const Point y = vec(rng.normal_vector(n));
      const double gap = distance(d(e[0], e[1]).op.apply(y), d(e[1], e[0]).op.apply(y));
      rec.check(gap <= 1e-9, gap, tag("commuting application", k));
    });
  return rec.result();
}

// ---------------------------------------------------------------------------
// 9

CriterionResult naturality(std::uint64_t seed) {
  Recorder rec(9, "naturality diagram");
  Rng rng(seed + 909);
  const SolveConfig cfg = tight();
  const auto record = [&](const NaturalityReport& r, const std::string& what) {
    const double w = std::max(std::abs(r.outer_residual), std::abs(r.inner_residual));
    rec.check(r.pass && w <= 1e-7, w, what);
  };
  {
    const Index n = 5;
    const Ambient amb = Ambient::vector(n);
    const DivergenceSpec spec(Potential::euclidean(n));
    for (int k = 0; k < 20; ++k)
      rec.guarded(tag("euclidean", k), [&] {
        const VectorXd phi = rng.normal_vector(n);
        const int mk = rng.uniform_int(1, 2), ml = rng.uniform_int(1, 2);
        const MatrixXd AK = MatrixXd(rng.normal_vector(mk * n).reshaped(mk, n));
        MatrixXd AL(mk + ml, n);
        AL << AK, MatrixXd(rng.normal_vector(ml * n).reshaped(ml, n));
        const ConstraintSet K = ConstraintSet::affine(amb, AK, AK * phi);
        const ConstraintSet L = ConstraintSet::affine(amb, AL, AL * phi);
        record(check_naturality_diagram(spec, K, L, vec(phi), vec(3.0 * rng.normal_vector(n)), cfg),
               tag("euclidean", k));
      });
  }
  {
    const Index n = 5;
    const Ambient amb = Ambient::vector(n);
    const DivergenceSpec spec(Potential::negative_entropy(n));
    for (int k = 0; k < 15; ++k)
      rec.guarded(tag("kl", k), [&] {
        const VectorXd phi = rng.probability_vector(n);
        const VectorXd a1 = rng.normal_vector(n), a2 = rng.normal_vector(n);
        const ConstraintSet K = k % 3 == 0 ? ConstraintSet::simplex(n)
                                           : intersect(ConstraintSet::simplex(n),
                                                       ConstraintSet::hyperplane(amb, a1, a1.dot(phi)));
        const ConstraintSet L = intersect(K, ConstraintSet::hyperplane(amb, a2, a2.dot(phi)));
        record(check_naturality_diagram(spec, K, L, vec(phi), vec(rng.positive_vector(n)), cfg), tag("kl", k));
      });
  }
  {
    for (int k = 0; k < 15; ++k)
      rec.guarded(tag("von neumann", k), [&] {
        const Index side = k % 2 == 0 ? 2 : 3;
        const DivergenceSpec spec(Potential::spectral_von_neumann(side));
        const Point phi = random_density_point(rng, side, side);
        const MatrixXcd H = rng.hermitian(side);
        const ConstraintSet K = ConstraintSet::spectral_trace(side, 1.0);
        const ConstraintSet L =
            intersect(K, ConstraintSet::spectral_expectation(H, (H * phi.mat()).trace().real()));
        record(check_naturality_diagram(spec, K, L, phi, random_pd(rng, side), cfg), tag("von neumann", k));
      });
  }
  return rec.result();
}

// ---------------------------------------------------------------------------
// 10

CriterionResult resource_theories(std::uint64_t seed) {
  Recorder rec(10, "resource theories");
  Rng rng(seed + 1010);
  const auto record = [&](const TheoryCheck& c, const std::string& what) {
    rec.check(c.pass() && c.pairs > 0, std::max({0.0, c.max_monotone_excess, c.max_stability_defect}), what);
  };

  // (i) qubit channels fixing I/2 under D_gamma
  rec.guarded("type i, qubit", [&] {
    CandidateMapSet ops;
    for (double p : {0.2, 0.6}) {
      const quantum::KrausMap T = quantum::KrausMap::depolarizing(2, p);
      ops.push_back({"depolarize", [T](const Point& x) { return T(x); }, MapClass::CN});
    }
    for (int i = 0; i < 2; ++i) {
      const quantum::KrausMap U = quantum::KrausMap::unitary(quantum::random_unitary(2, rng));
      ops.push_back({"unitary", [U](const Point& x) { return U(x); }, MapClass::CN});
    }
    const Point mixed(MatrixXcd(0.5 * MatrixXcd::Identity(2, 2)));
    const ResourceTheory t =
        build_theory_i(ops, FreeSet::finite({mixed}), Divergence::gamma(0.5), std::nullopt,
                       [](Rng& r) { return random_density_point(r, 2, 2); }, 20, rng.next_seed());
    record(validate(t, 200, rng.next_seed()), "type i, qubit");
  });
  // (i) euclidean contractions of the unit ball
  rec.guarded("type i, euclidean ball", [&] {
    const Index n = 3;
    const Ambient amb = Ambient::vector(n);
    const MatrixXd R = Eigen::HouseholderQR<MatrixXd>(MatrixXd(rng.normal_vector(n * n).reshaped(n, n))).householderQ();
    CandidateMapSet ops = {{"rotate", [R](const Point& x) { return Point(VectorXd(R * x.vec())); }, MapClass::CN},
                           {"halve", [](const Point& x) { return 0.5 * x; }, MapClass::CN}};
    const DivergenceSpec spec(Potential::euclidean(n));
    const ResourceTheory t =
        build_theory_i(ops, FreeSet::of(ConstraintSet::norm_ball(amb, 2.0, 1.0)), Divergence::from_spec(spec), spec,
                       [n](Rng& r) { return vec(2.0 * r.normal_vector(n)); }, 20, rng.next_seed());
    record(validate(t, 200, rng.next_seed()), "type i, euclidean ball");
  });

  // (ii) left projections onto nested affine sets
  rec.guarded("type ii, nested affine", [&] {
    const Index n = 4;
    const Ambient amb = Ambient::vector(n);
    const DivergenceSpec spec(Potential::euclidean(n));
    const VectorXd x0 = rng.normal_vector(n);
    const MatrixXd A1 = MatrixXd(rng.normal_vector(n).reshaped(1, n));
    MatrixXd A2(2, n);
    A2 << A1, MatrixXd(rng.normal_vector(n).reshaped(1, n));
    const ConstraintSet K1 = ConstraintSet::affine(amb, A1, A1 * x0);
    const ConstraintSet K2 = ConstraintSet::affine(amb, A2, A2 * x0);
    const ProjectionOperator P1(Side::Left, spec, K1), P2(Side::Left, spec, K2);
    CandidateMapSet ops = {{"P_K1", [P1](const Point& x) { return P1.apply(x); }, MapClass::LSQ},
                           {"P_K2", [P2](const Point& x) { return P2.apply(x); }, MapClass::LSQ}};
    std::vector<Point> reps;
    for (int i = 0; i < 3; ++i) reps.push_back(P2.apply(vec(rng.normal_vector(n))));
    reps.push_back(P1.apply(vec(rng.normal_vector(n))));  // fixed by P_K1 only: dropped
    const ResourceTheory t = build_theory_ii(ops, reps, Divergence::from_spec(spec), spec,
                                             [n](Rng& r) { return vec(2.0 * r.normal_vector(n)); }, 20,
                                             rng.next_seed());
    rec.check(t.free_set.points.size() == 3, 0.0, "type ii common fixed set");
    record(validate(t, 200, rng.next_seed()), "type ii, nested affine");
  });
  // (ii-R) right entropic projections onto exponential families through phi
  std::vector<ResourceTheory> rsq;
  constexpr Index nk = 4;
  const DivergenceSpec kl(Potential::negative_entropy(nk));
  const VectorXd mstar = 0.5 * rng.normal_vector(nk);
  const Point phi_star = kl.potential.conjugate_grad(vec(mstar));
  rec.guarded("type ii-R, exponential families", [&] {
    const Ambient amb = Ambient::vector(nk);
    for (int i = 0; i < 2; ++i) {
      const MatrixXd A = MatrixXd(rng.normal_vector(2 * nk).reshaped(2, nk));
      const ProjectionOperator R(Side::Right, kl, ConstraintSet::affine(amb, A, A * mstar));
      CandidateMapSet ops = {{"R_" + std::to_string(i), [R](const Point& x) { return R.apply(x, tight()); }, MapClass::RSQ}};
      const ResourceTheory t = build_theory_ii(ops, {phi_star}, Divergence::from_spec(kl), kl,
                                               [nk](Rng& r) { return vec(r.positive_vector(nk)); }, 20,
                                               rng.next_seed());
      record(validate(t, 100, rng.next_seed()), "type ii-R, exponential family " + std::to_string(i));
      rsq.push_back(t);
    }
  });

  // (iii) anchors above K
  rec.guarded("type iii, euclidean point", [&] {
    const Index n = 3;
    const Ambient amb = Ambient::vector(n);
    const DivergenceSpec spec(Potential::euclidean(n));
    const VectorXd k0 = rng.normal_vector(n);
    const ConstraintSet K = ConstraintSet::affine(amb, MatrixXd::Identity(n, n), k0);
    std::vector<ConstraintSet> anchors;
    for (int i = 0; i < 2; ++i) {
      const VectorXd a = rng.normal_vector(n);
      anchors.push_back(ConstraintSet::hyperplane(amb, a, a.dot(k0)));
    }
    const ResourceTheory t = build_theory_iii(K, anchors, spec, Side::Left,
                                              [n](Rng& r) { return vec(2.0 * r.normal_vector(n)); });
    record(validate(t, 200, rng.next_seed()), "type iii, euclidean point");
    const HomMonoidElement both = compose_diamond(t.anchors[0], t.anchors[1]);
    rec.check(subset_of(K, both.target()).verdict == Verdict::True, 0.0, "type iii diamond contains K");
  });
  rec.guarded("type iii, entropy simplex", [&] {
    const Index n = 4;
    const Ambient amb = Ambient::vector(n);
    const DivergenceSpec spec(Potential::negative_entropy(n));
    const VectorXd p0 = rng.probability_vector(n), a = rng.normal_vector(n);
    const ConstraintSet H = ConstraintSet::hyperplane(amb, a, a.dot(p0));
    const ConstraintSet K = intersect(ConstraintSet::simplex(n), H);
    const ResourceTheory t = build_theory_iii(K, {ConstraintSet::simplex(n), H, K}, spec, Side::Left,
                                              [n](Rng& r) { return vec(r.positive_vector(n)); });
    record(validate(t, 200, rng.next_seed()), "type iii, entropy simplex");
  });
  rec.guarded("type iii, entropy right", [&] {
    const Ambient amb = Ambient::vector(nk);
    const MatrixXd A = MatrixXd(rng.normal_vector(2 * nk).reshaped(2, nk));
    const ConstraintSet M = ConstraintSet::affine(amb, A, A * mstar);
    const ConstraintSet Q1 = ConstraintSet::hyperplane(amb, A.row(0).transpose(), A.row(0).dot(mstar));
    const ConstraintSet Q2 = ConstraintSet::hyperplane(amb, A.row(1).transpose(), A.row(1).dot(mstar));
    const ResourceTheory t = build_theory_iii(M, {Q1, Q2}, kl, Side::Right,
                                              [nk](Rng& r) { return vec(r.positive_vector(nk)); });
    record(validate(t, 100, rng.next_seed()), "type iii, entropy right");
  });

  // convex envelope of type (ii-R) theories
  rec.guarded("envelope, exponential families", [&] {
    if (rsq.size() != 2) throw Error("type ii-R theories missing");
    std::vector<Point> samples;
    for (int i = 0; i < 100; ++i) samples.push_back(vec(rng.positive_vector(nk)));
    const EnvelopeReport rep = convex_envelope_check(rsq, {0.3, 0.7}, samples, phi_star);
    rec.check(rep.pass, std::max(0.0, -rep.min_margin), "envelope, exponential families");
  });
  rec.guarded("envelope, euclidean hyperplanes", [&] {
    const Index n = 3;
    const Ambient amb = Ambient::vector(n);
    const DivergenceSpec spec(Potential::euclidean(n));
    const VectorXd phi = rng.normal_vector(n);
    std::vector<ResourceTheory> ts;
    for (int i = 0; i < 2; ++i) {
      const VectorXd a = rng.normal_vector(n);
      const ProjectionOperator P(Side::Left, spec, ConstraintSet::hyperplane(amb, a, a.dot(phi)));
      ts.push_back(build_theory_ii({{"P", [P](const Point& x) { return P.apply(x); }, MapClass::RSQ}}, {vec(phi)},
                                   Divergence::from_spec(spec), spec,
                                   [n](Rng& r) { return vec(2.0 * r.normal_vector(n)); }, 20, rng.next_seed()));
    }
    std::vector<Point> samples;
    for (int i = 0; i < 100; ++i) samples.push_back(vec(2.0 * rng.normal_vector(n)));
    const EnvelopeReport rep = convex_envelope_check(ts, {0.5, 0.5}, samples, vec(phi));
    rec.check(rep.pass, std::max(0.0, -rep.min_margin), "envelope, euclidean hyperplanes");
  });
  return rec.result();
}

// ---------------------------------------------------------------------------
// 11

CriterionResult deficiency_laws(std::uint64_t seed) {
  Recorder rec(11, "deficiency");
  Rng rng(seed + 1111);
  const Index n = 4;
  const int grid = 6;
  const DivergenceSpec kl(Potential::negative_entropy(n));
  const Divergence D = Divergence::from_spec(kl);
  const auto model = [&](const std::vector<Point>& pts) {
    std::vector<VectorXd> g;
    for (int i = 0; i < grid; ++i) g.push_back(VectorXd::Constant(1, i));
    return ParametrizedModel(g, pts);
  };
  const auto kernel_map = [](const MatrixXd& K) {
    return Map([K](const Point& x) { return Point(VectorXd(stochastic_apply(K, x.vec()))); });
  };

  for (int k = 0; k < 10; ++k)
    rec.guarded(tag("left equivalence", k), [&] {
      std::vector<Point> p1, p2;
      std::vector<int> perm(n);
      for (int i = 0; i < n; ++i) perm[i] = i;
      for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.uniform_int(0, i)]);
      const auto permute = [perm](const Point& x) {
        VectorXd out(x.vec().size());
        for (Index i = 0; i < out.size(); ++i) out(perm[i]) = x.vec()(i);
        return Point(out);
      };
      const auto unpermute = [perm](const Point& x) {
        VectorXd out(x.vec().size());
        for (Index i = 0; i < out.size(); ++i) out(i) = x.vec()(perm[i]);
        return Point(out);
      };
      for (int i = 0; i < grid; ++i) {
        p1.push_back(vec(rng.probability_vector(n)));
        p2.push_back(permute(p1.back()));
      }
      const ParametrizedModel M1 = model(p1), M2 = model(p2);
      const CandidateMapSet c12 = {{"garble", kernel_map(random_stochastic(rng, n)), MapClass::CN},
                                   {"permute", permute, MapClass::CN}};
      const CandidateMapSet c21 = {{"unpermute", unpermute, MapClass::CN},
                                   {"garble", kernel_map(random_stochastic(rng, n)), MapClass::CN}};
      const ExtendedReal m = mutual_deficiency(M1, M2, c12, c21, D);
      rec.check(m.is_finite() && m.value() == 0.0, m.value_or(kInf), tag("mutual deficiency", k));
      rec.check(equivalence_check(M1, M2, c12, c21).equivalent, 0.0, tag("equivalence", k));
    });

  for (int k = 0; k < 10; ++k)
    rec.guarded(tag("monotonicity", k), [&] {
      // M1 = S(M2) with S a Markov kernel; candidates from M2 contain those from M1 composed with S
      const MatrixXd S = random_stochastic(rng, n);
      std::vector<Point> p1, p2, p3;
      for (int i = 0; i < grid; ++i) {
        p2.push_back(vec(rng.probability_vector(n)));
        p1.push_back(vec(stochastic_apply(S, p2.back().vec())));
        p3.push_back(vec(rng.probability_vector(n)));
      }
      const ParametrizedModel M1 = model(p1), M2 = model(p2), M3 = model(p3);
      CandidateMapSet c13, c23;
      const Map s = kernel_map(S);
      for (int j = 0; j < 4; ++j) {
        const Map c = kernel_map(random_stochastic(rng, n));
        c13.push_back({"C" + std::to_string(j), c, MapClass::CN});
        c23.push_back({"C" + std::to_string(j) + "oS", [c, s](const Point& x) { return c(s(x)); }, MapClass::CN});
      }
      c23.push_back({"extra", kernel_map(random_stochastic(rng, n)), MapClass::CN});
      const ExtendedReal d31 = deficiency(M1, M3, c13, D).value;
      const ExtendedReal d32 = deficiency(M2, M3, c23, D).value;
      const double excess = d32.value_or(kInf) - d31.value_or(kInf);
      rec.check(d32 <= d31, std::max(0.0, excess), tag("directed monotonicity", k));
    });
  return rec.result();
}

// ---------------------------------------------------------------------------

const std::vector<Battery>& batteries() {
  static const std::vector<Battery> all = {
      {1, "divergence axioms", divergence_axioms},
      {2, "legendre machinery", legendre_machinery},
      {3, "pythagorean identities", pythagorean_identities},
      {4, "diamond composition", diamond_composition},
      {5, "right projection identity", right_projection_identity},
      {6, "quantum verification", quantum_verification},
      {7, "cptp contraction of d_gamma", cptp_contraction},
      {8, "hom-monoid laws", hom_monoid_laws},
      {9, "naturality diagram", naturality},
      {10, "resource theories", resource_theories},
      {11, "deficiency", deficiency_laws},
  };
  return all;
}

std::vector<CriterionResult> run_all(std::uint64_t seed) {
  std::vector<CriterionResult> out;
  for (const Battery& b : batteries()) out.push_back(b.run(seed));
  return out;
}

std::string summary(const std::vector<CriterionResult>& results) {
  std::ostringstream os;
  bool all = true;
  char buf[256];
  for (const CriterionResult& r : results) {
    all = all && r.pass();
    std::snprintf(buf, sizeof buf, "%2d %-30s %s checks=%zu failures=%zu worst=%.17g\n", r.id,
                  r.name.c_str(), r.pass() ? "PASS" : "FAIL", r.checks, r.failures, r.worst);
    os << buf;
    for (const std::string& d : r.details) os << "     " << d << "\n";
  }
  os << (all ? "ALL PASS" : "SOME FAIL") << "\n";
  return os.str();
}

}  // namespace bregman::suite
