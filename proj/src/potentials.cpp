#include "bregman/potentials.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "bregman/errors.hpp"
#include "bregman/numerics.hpp"
#include "bregman/spectral.hpp"

namespace bregman {

namespace {

constexpr double kInteriorThreshold = spectral::kSupportThreshold;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Gauge

Gauge::Gauge(Fn forward, Fn inverse, Fn antiderivative)
    : forward_(std::move(forward)),
      inverse_(std::move(inverse)),
      antiderivative_(std::move(antiderivative)) {
  if (!forward_) throw ConstructionError("gauge: forward map is required");
}

Gauge Gauge::power(double coefficient, double exponent) {
  if (!(coefficient > 0.0) || !(exponent > 0.0))
    throw ConstructionError("gauge: power gauge needs positive coefficient and exponent");
  const double c = coefficient, e = exponent;
  return Gauge([c, e](double t) { return t <= 0.0 ? 0.0 : c * std::pow(t, e); },
               [c, e](double r) { return r <= 0.0 ? 0.0 : std::pow(r / c, 1.0 / e); },
               [c, e](double s) { return s <= 0.0 ? 0.0 : c * std::pow(s, e + 1.0) / (e + 1.0); });
}

double Gauge::inverse(double r) const {
  if (r <= 0.0) return 0.0;
  if (inverse_) return inverse_(r);
  const auto f = [this, r](double s) { return forward_(s) - r; };
  double hi = 0.0;
  const bool ok = numerics::expand_bracket(
      f, [](double s) { return std::isfinite(s); }, 0.0, std::max(1.0, r), hi);
  if (!ok) throw DomainError("gauge: value " + fmt(r) + " is outside the range of the gauge");
  return numerics::solve_increasing(f, 0.0, hi);
}

double Gauge::profile(double s) const {
  if (s <= 0.0) return 0.0;
  if (antiderivative_) return antiderivative_(s);
  return numerics::adaptive_simpson(forward_, 0.0, s, 1e-10);
}

double Gauge::profile_conjugate(double r) const {
  if (r <= 0.0) return 0.0;
  const double s = inverse(r);
  return r * s - profile(s);
}

void Gauge::validate() const {
  if (std::abs(forward_(0.0)) > 1e-14) throw ConstructionError("gauge: phi(0) must be 0");
  double prev = forward_(0.0);
  for (int i = 1; i <= 400; ++i) {
    const double t = 1e3 * std::pow(static_cast<double>(i) / 400.0, 3.0);
    const double v = forward_(t);
    if (!std::isfinite(v) || !(v > prev))
      throw ConstructionError("gauge: not strictly increasing near t = " + fmt(t) +
                              " (non-Legendre potential)");
    prev = v;
  }
  for (int i = 0; i <= 100; ++i) {
    const double t = 1e3 * std::pow(static_cast<double>(i) / 100.0, 2.0);
    const double back = forward_(inverse(t));
    if (std::abs(back - t) > 1e-10 * std::max(1.0, t))
      throw ConstructionError("gauge: forward(inverse(t)) != t at t = " + fmt(t));
  }
}

// ---------------------------------------------------------------------------
// Orlicz functions

OrliczFunction OrliczFunction::power(double p) {
  if (!(p > 1.0)) throw ConstructionError("orlicz: |t|^p needs p > 1");
  OrliczFunction f;
  f.value = [p](double t) { return std::pow(std::abs(t), p); };
  f.derivative = [p](double t) {
    return t == 0.0 ? 0.0 : std::copysign(p * std::pow(std::abs(t), p - 1.0), t);
  };
  f.inverse = [p](double h) { return h <= 0.0 ? 0.0 : std::pow(h, 1.0 / p); };
  f.name = "power(" + fmt(p) + ")";
  return f;
}

OrliczFunction OrliczFunction::exp_minus_one() {
  OrliczFunction f;
  f.value = [](double t) { return std::expm1(std::abs(t)); };
  f.derivative = [](double t) {
    return t == 0.0 ? 0.0 : std::copysign(std::exp(std::abs(t)), t);
  };
  f.inverse = [](double h) { return h <= 0.0 ? 0.0 : std::log1p(h); };
  f.name = "exp_minus_one";
  return f;
}

OrliczFunction OrliczFunction::cosh_minus_one() {
  OrliczFunction f;
  f.value = [](double t) { return std::cosh(t) - 1.0; };
  f.derivative = [](double t) { return std::sinh(t); };
  f.inverse = [](double h) { return h <= 0.0 ? 0.0 : std::acosh(1.0 + h); };
  f.name = "cosh_minus_one";
  return f;
}

double OrliczFunction::inverse_at(double h) const {
  if (h <= 0.0) return 0.0;
  if (inverse) return inverse(h);
  const auto f = [this, h](double t) { return value(t) - h; };
  double hi = 0.0;
  if (!numerics::expand_bracket(
          f, [](double t) { return std::isfinite(t); }, 0.0, 1.0, hi))
    throw DomainError("orlicz: value outside the range of Phi");
  return numerics::solve_increasing(f, 0.0, hi);
}

void OrliczFunction::validate() const {
  if (!value) throw ConstructionError("orlicz: Phi is required");
  if (std::abs(value(0.0)) > 1e-14) throw ConstructionError("orlicz: Phi(0) must be 0");
  bool nonzero = false;
  for (int i = -40; i <= 40; ++i) {
    const double t = 0.25 * i;
    const double v = value(t);
    if (std::abs(v - value(-t)) > 1e-12 * (1.0 + std::abs(v)))
      throw ConstructionError("orlicz: Phi must be even");
    if (v != 0.0) nonzero = true;
    for (double s : {0.1, 0.7, 2.0}) {
      const double mid = value(t + 0.5 * s);
      const double avg = 0.5 * (value(t) + value(t + s));
      if (mid > avg + 1e-12 * (1.0 + std::abs(avg)))
        throw ConstructionError("orlicz: Phi fails sampled convexity near t = " + fmt(t));
    }
  }
  if (!nonzero) throw ConstructionError("orlicz: Phi must not vanish identically");
}

double luxemburg_norm(const OrliczFunction& phi, const Eigen::VectorXd& x) {
  const double scale = x.cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) return 0.0;
  // increasing in lambda; root is the Luxemburg norm
  const auto f = [&](double lambda) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) s += phi.value(std::abs(x(i)) / lambda);
    return 1.0 - s;
  };
  double lo = scale, hi = scale;
  int guard = 0;
  while (f(lo) > 0.0 && guard++ < 2000) lo *= 0.5;
  guard = 0;
  while (f(hi) < 0.0 && guard++ < 2000) hi *= 2.0;
  return numerics::solve_increasing(f, lo, hi, 1e-16);
}

// ---------------------------------------------------------------------------
// Potential models

std::string PotentialModel::interior_violation(const Point& x) const {
  return in_interior(x) ? std::string() : std::string("point outside int dom ") + name();
}

namespace {

class EuclideanModel final : public PotentialModel {
 public:
  explicit EuclideanModel(Ambient a) : ambient_(a) {}
  PotentialKind kind() const override { return PotentialKind::Euclidean; }
  Ambient ambient() const override { return ambient_; }
  std::string name() const override { return "euclidean"; }
  AdaptednessFlags flags() const override { return {true, true}; }
  bool in_domain(const Point&) const override { return true; }
  bool in_interior(const Point&) const override { return true; }
  double value(const Point& x) const override { return 0.5 * inner(x, x); }
  Point gradient(const Point& x) const override { return x; }
  bool in_conjugate_interior(const Point&) const override { return true; }
  double conjugate_value(const Point& y) const override { return 0.5 * inner(y, y); }
  Point conjugate_gradient(const Point& y) const override { return y; }
  bool divergence(const Point& z, const Point& w, double& out) const override {
    const Point d = z - w;
    out = 0.5 * inner(d, d);
    return true;
  }

 private:
  Ambient ambient_;
};

class NegativeEntropyModel final : public PotentialModel {
 public:
  explicit NegativeEntropyModel(Eigen::Index n) : n_(n) {}
  PotentialKind kind() const override { return PotentialKind::NegativeEntropy; }
  Ambient ambient() const override { return Ambient::vector(n_); }
  std::string name() const override { return "negative_entropy"; }
  bool in_domain(const Point& x) const override { return x.vec().minCoeff() >= 0.0; }
  bool in_interior(const Point& x) const override {
    return x.vec().minCoeff() >= kInteriorThreshold;
  }
  std::string interior_violation(const Point& x) const override {
    const auto& v = x.vec();
    for (Eigen::Index i = 0; i < v.size(); ++i)
      if (!(v(i) >= kInteriorThreshold))
        return "coordinate " + std::to_string(i) + " = " + fmt(v(i)) +
               " is below the interior threshold 1e-12";
    return {};
  }
  double value(const Point& x) const override {
    double s = 0.0;
    for (double xi : x.vec()) s += spectral::xlogx(xi) - xi;
    return s;
  }
  Point gradient(const Point& x) const override {
    return Point(Eigen::VectorXd(x.vec().array().log()));
  }
  bool in_conjugate_interior(const Point&) const override { return true; }
  double conjugate_value(const Point& y) const override { return y.vec().array().exp().sum(); }
  Point conjugate_gradient(const Point& y) const override {
    return Point(Eigen::VectorXd(y.vec().array().exp()));
  }
  bool divergence(const Point& z, const Point& w, double& out) const override {
    const auto& a = z.vec();
    const auto& b = w.vec();
    double s = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      if (a(i) > 0.0) s += a(i) * std::log(a(i) / b(i));
      s += b(i) - a(i);
    }
    out = s;
    return true;
  }

 private:
  Eigen::Index n_;
};

/// Psi(x) = profile(||x||_2) for a gauge profile; vectors or matrices.
class NormGaugeModel final : public PotentialModel {
 public:
  NormGaugeModel(Gauge g, Ambient a, PotentialKind kind, std::string name,
                 AdaptednessFlags flags)
      : gauge_(std::move(g)), ambient_(a), kind_(kind), name_(std::move(name)), flags_(flags) {}
  PotentialKind kind() const override { return kind_; }
  Ambient ambient() const override { return ambient_; }
  std::string name() const override { return name_; }
  AdaptednessFlags flags() const override { return flags_; }
  bool in_domain(const Point&) const override { return true; }
  bool in_interior(const Point&) const override { return true; }
  double value(const Point& x) const override { return gauge_.profile(norm(x)); }
  Point gradient(const Point& x) const override {
    const double r = norm(x);
    if (r == 0.0) return zero_like(x);
    return (gauge_(r) / r) * x;
  }
  bool in_conjugate_interior(const Point&) const override { return true; }
  double conjugate_value(const Point& y) const override {
    return gauge_.profile_conjugate(norm(y));
  }
  Point conjugate_gradient(const Point& y) const override {
    const double r = norm(y);
    if (r == 0.0) return zero_like(y);
    return (gauge_.inverse(r) / r) * y;
  }

 private:
  Gauge gauge_;
  Ambient ambient_;
  PotentialKind kind_;
  std::string name_;
  AdaptednessFlags flags_;
};

/// Psi(x) = profile(||x||_Phi) over the Luxemburg norm.
class OrliczGaugeModel final : public PotentialModel {
 public:
  OrliczGaugeModel(OrliczFunction phi, Gauge g, Eigen::Index n)
      : phi_(std::move(phi)), gauge_(std::move(g)), n_(n) {}
  PotentialKind kind() const override { return PotentialKind::OrliczGauge; }
  Ambient ambient() const override { return Ambient::vector(n_); }
  std::string name() const override { return "orlicz_gauge(" + phi_.name + ")"; }
  AdaptednessFlags flags() const override { return {true, false}; }
  bool in_domain(const Point&) const override { return true; }
  bool in_interior(const Point&) const override { return true; }
  double value(const Point& x) const override {
    return gauge_.profile(luxemburg_norm(phi_, x.vec()));
  }
  Point gradient(const Point& x) const override {
    const auto& v = x.vec();
    const double lambda = luxemburg_norm(phi_, v);
    if (lambda == 0.0) return zero_like(x);
    // implicit differentiation of sum Phi(x_i / lambda) = 1
    Eigen::VectorXd w(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) w(i) = phi_.derivative(v(i) / lambda);
    const double denom = w.dot(v);
    return Point(Eigen::VectorXd(gauge_(lambda) * lambda / denom * w));
  }
  bool in_conjugate_interior(const Point&) const override { return true; }
  double conjugate_value(const Point& y) const override {
    const Point x = conjugate_gradient(y);
    return inner(x, y) - value(x);
  }
  Point conjugate_gradient(const Point& y) const override;

 private:
  OrliczFunction phi_;
  Gauge gauge_;
  Eigen::Index n_;
};

Point OrliczGaugeModel::conjugate_gradient(const Point& y) const {
  const auto& target = y.vec();
  const double r = target.norm();
  if (r == 0.0) return zero_like(y);
  // Newton on grad Psi(x) = y, i.e. minimisation of Psi(x) - <x, y>
  Eigen::VectorXd x = target * (gauge_.inverse(r) / r);
  const auto residual = [&](const Eigen::VectorXd& p) {
    return Eigen::VectorXd(gradient(Point(p)).vec() - target);
  };
  Eigen::VectorXd g = residual(x);
  const double tol = 1e-14 * (1.0 + r);
  for (int it = 0; it < 200 && g.norm() > tol; ++it) {
    const Eigen::Index n = x.size();
    Eigen::MatrixXd h(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double step = 1e-6 * (1.0 + std::abs(x(j)));
      Eigen::VectorXd xp = x, xm = x;
      xp(j) += step;
      xm(j) -= step;
      h.col(j) = (residual(xp) - residual(xm)) / (2.0 * step);
    }
    h = 0.5 * (h + h.transpose()).eval();
    Eigen::VectorXd d = -h.ldlt().solve(g);
    if (!d.allFinite()) d = -g;
    double t = 1.0;
    Eigen::VectorXd next = x + d;
    Eigen::VectorXd gn = residual(next);
    while (gn.norm() >= g.norm() && t > 1e-12) {
      t *= 0.5;
      next = x + t * d;
      gn = residual(next);
    }
    if (gn.norm() >= g.norm()) break;
    x = next;
    g = gn;
  }
  return Point(std::move(x));
}

class VonNeumannModel final : public PotentialModel {
 public:
  explicit VonNeumannModel(Eigen::Index side) : side_(side) {}
  PotentialKind kind() const override { return PotentialKind::SpectralVonNeumann; }
  Ambient ambient() const override { return Ambient::matrix(side_); }
  std::string name() const override { return "spectral_von_neumann"; }
  bool in_domain(const Point& x) const override {
    return spectral::min_eigenvalue(x.mat()) >= -kInteriorThreshold;
  }
  bool in_interior(const Point& x) const override {
    return spectral::min_eigenvalue(x.mat()) >= kInteriorThreshold;
  }
  std::string interior_violation(const Point& x) const override {
    const double m = spectral::min_eigenvalue(x.mat());
    if (m >= kInteriorThreshold) return {};
    return "minimum eigenvalue " + fmt(m) + " is below the interior threshold 1e-12";
  }
  double value(const Point& x) const override {
    const auto es = spectral::eigh(x.mat());
    double s = 0.0;
    for (double l : es.values) s += spectral::xlogx(std::max(l, 0.0)) - l;
    return s;
  }
  Point gradient(const Point& x) const override { return Point(spectral::log(x.mat())); }
  bool in_conjugate_interior(const Point&) const override { return true; }
  double conjugate_value(const Point& y) const override {
    return spectral::eigh(y.mat()).values.array().exp().sum();
  }
  Point conjugate_gradient(const Point& y) const override { return Point(spectral::exp(y.mat())); }
  bool divergence(const Point& z, const Point& w, double& out) const override {
    const auto ez = spectral::eigh(z.mat());
    const auto ew = spectral::eigh(w.mat());
    double s = 0.0;
    for (double l : ez.values) s += spectral::xlogx(std::max(l, 0.0));
    for (Eigen::Index j = 0; j < ew.values.size(); ++j) {
      const auto v = ew.vectors.col(j);
      const double weight = (v.adjoint() * z.mat() * v)(0, 0).real();
      s -= weight * std::log(ew.values(j));
    }
    out = s - spectral::trace_re(z.mat()) + spectral::trace_re(w.mat());
    return true;
  }

 private:
  Eigen::Index side_;
};

std::string gauge_name(const char* base, double beta) {
  return std::string(base) + "(beta=" + fmt(beta) + ")";
}

}  // namespace

std::string to_string(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::Euclidean: return "euclidean";
    case PotentialKind::NegativeEntropy: return "negative_entropy";
    case PotentialKind::PowerGauge: return "power_gauge";
    case PotentialKind::NormGauge: return "norm_gauge";
    case PotentialKind::OrliczGauge: return "orlicz_gauge";
    case PotentialKind::SpectralVonNeumann: return "spectral_von_neumann";
    case PotentialKind::SpectralPower: return "spectral_power";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Potential

Potential Potential::euclidean(const Ambient& ambient) {
  if (ambient.dim <= 0) throw ArgumentError("potential: dimension must be positive");
  return Potential(std::make_shared<EuclideanModel>(ambient), false);
}

Potential Potential::negative_entropy(Eigen::Index dim) {
  if (dim <= 0) throw ArgumentError("potential: dimension must be positive");
  return Potential(std::make_shared<NegativeEntropyModel>(dim), false);
}

Potential Potential::power_gauge(double beta, const Ambient& ambient) {
  if (!(beta > 0.0 && beta < 1.0)) throw ConstructionError("power gauge: beta must lie in ]0,1[");
  if (ambient.dim <= 0) throw ArgumentError("potential: dimension must be positive");
  Gauge g = Gauge::power(1.0, 1.0 / beta - 1.0);
  const PotentialKind kind =
      ambient.kind == PointKind::Matrix ? PotentialKind::SpectralPower : PotentialKind::PowerGauge;
  // RSQ-adaptedness is known for beta = 1/2 on Hilbert spaces
  const AdaptednessFlags flags{true, beta == 0.5};
  return Potential(
      std::make_shared<NormGaugeModel>(std::move(g), ambient, kind,
                                       gauge_name("power_gauge", beta), flags),
      false);
}

Potential Potential::orlicz_gauge(const OrliczFunction& phi, const Gauge& gauge, Eigen::Index dim) {
  if (dim <= 0) throw ArgumentError("potential: dimension must be positive");
  phi.validate();
  gauge.validate();
  return Potential(std::make_shared<OrliczGaugeModel>(phi, gauge, dim), false);
}

Potential Potential::spectral_von_neumann(Eigen::Index side) {
  if (side <= 0) throw ArgumentError("potential: dimension must be positive");
  return Potential(std::make_shared<VonNeumannModel>(side), false);
}

Potential Potential::spectral_power(double gamma, double beta, Eigen::Index side) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw ConstructionError("spectral power: gamma must lie in ]0,1[");
  if (!(beta > 0.0 && beta < 1.0)) throw ConstructionError("spectral power: beta must lie in ]0,1[");
  Gauge g = Gauge::power(1.0, 1.0 / beta - 1.0);
  return Potential(std::make_shared<NormGaugeModel>(
                       std::move(g), Ambient::matrix(side), PotentialKind::SpectralPower,
                       "spectral_power(gamma=" + fmt(gamma) + ",beta=" + fmt(beta) + ")",
                       AdaptednessFlags{true, false}),
                   false);
}

Potential make_gauge_potential(const Gauge& gauge, double norm_exponent, Eigen::Index dim) {
  if (norm_exponent != 2.0)
    throw ConstructionError("gauge potential: only the 2-norm is supported (got p = " +
                            fmt(norm_exponent) + ")");
  if (dim <= 0) throw ArgumentError("potential: dimension must be positive");
  gauge.validate();
  return Potential(std::make_shared<NormGaugeModel>(gauge, Ambient::vector(dim),
                                                    PotentialKind::NormGauge, "norm_gauge",
                                                    AdaptednessFlags{true, false}),
                   false);
}

std::string Potential::name() const {
  return dual_ ? model_->name() + "*" : model_->name();
}

Potential Potential::conjugate() const { return Potential(model_, !dual_); }

bool Potential::in_domain(const Point& x) const {
  require_ambient(x, ambient(), "potential domain");
  return dual_ ? model_->in_conjugate_interior(x) : model_->in_domain(x);
}

bool Potential::in_interior(const Point& x) const {
  require_ambient(x, ambient(), "potential interior");
  return dual_ ? model_->in_conjugate_interior(x) : model_->in_interior(x);
}

bool Potential::in_conjugate_interior(const Point& y) const {
  require_ambient(y, ambient(), "conjugate interior");
  return dual_ ? model_->in_interior(y) : model_->in_conjugate_interior(y);
}

ExtendedReal Potential::eval(const Point& x) const {
  require_ambient(x, ambient(), "eval_potential");
  if (dual_) {
    if (!model_->in_conjugate_interior(x)) return ExtendedReal::infinity();
    return model_->conjugate_value(x);
  }
  if (!model_->in_domain(x)) return ExtendedReal::infinity();
  return model_->value(x);
}

Point Potential::grad(const Point& x) const {
  require_ambient(x, ambient(), "grad_potential");
  if (dual_) {
    if (!model_->in_conjugate_interior(x))
      throw DomainError("grad " + name() + ": point outside int dom");
    return model_->conjugate_gradient(x);
  }
  if (!model_->in_interior(x))
    throw DomainError("grad " + name() + ": " + model_->interior_violation(x));
  return model_->gradient(x);
}

ExtendedReal Potential::conjugate_eval(const Point& y) const { return conjugate().eval(y); }

Point Potential::conjugate_grad(const Point& y) const { return conjugate().grad(y); }

bool Potential::specialised_divergence(const Point& z, const Point& w, double& out) const {
  if (dual_) return false;
  return model_->divergence(z, w, out);
}

}  // namespace bregman
