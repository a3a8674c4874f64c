#include "bregman/divergences.hpp"

#include <cmath>
#include <sstream>

#include "bregman/errors.hpp"
#include "bregman/spectral.hpp"

namespace bregman {

namespace {

constexpr double kSupport = spectral::kSupportThreshold;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

void require_same_ambient(const Point& a, const Point& b, const char* what) {
  if (!(a.ambient() == b.ambient()))
    throw ArgumentError(std::string(what) + ": arguments have different dimensions or kinds");
}

/// Hermitian within 1e-10 and PSD within 1e-10; throws ArgumentError.
void require_positive(const Point& p, const char* what) {
  if (p.is_vector()) {
    if (p.vec().size() > 0 && p.vec().minCoeff() < -1e-10)
      throw ArgumentError(std::string(what) + ": negative coordinate");
    return;
  }
  if (spectral::max_asymmetry(p.mat()) > 1e-10)
    throw ArgumentError(std::string(what) + ": matrix is not hermitian (asymmetry > 1e-10)");
  if (spectral::min_eigenvalue(p.mat()) < -1e-10)
    throw ArgumentError(std::string(what) + ": matrix is not positive semidefinite");
}

double total(const Point& p) { return p.is_vector() ? p.vec().sum() : spectral::trace_re(p.mat()); }

/// supp(a) inside supp(b) at the 1e-12 eigenvalue threshold.
bool support_contained(const Point& a, const Point& b) {
  if (a.is_vector()) {
    for (Eigen::Index i = 0; i < a.vec().size(); ++i)
      if (a.vec()(i) > kSupport && b.vec()(i) <= kSupport) return false;
    return true;
  }
  return spectral::weight_outside_support(a.mat(), spectral::eigh(b.mat())) <= kSupport;
}

/// Tr(a^g b^{1-g}) for PSD arguments.
double trace_power_product(const Point& a, const Point& b, double g) {
  if (a.is_vector()) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < a.vec().size(); ++i) {
      const double x = std::max(a.vec()(i), 0.0), y = std::max(b.vec()(i), 0.0);
      if (x > 0.0 && y > 0.0) s += std::pow(x, g) * std::pow(y, 1.0 - g);
    }
    return s;
  }
  const auto clip_pow = [](double e) {
    return [e](double x) { return x > spectral::kSupportThreshold ? std::pow(x, e) : 0.0; };
  };
  const Eigen::MatrixXcd ag = spectral::apply(a.mat(), clip_pow(g));
  const Eigen::MatrixXcd bg = spectral::apply(b.mat(), clip_pow(1.0 - g));
  return (ag * bg).trace().real();
}

}  // namespace

// ---------------------------------------------------------------------------
// EmbeddingMap

EmbeddingMap EmbeddingMap::mazur_power(double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw ConstructionError("mazur map: gamma must lie in ]0,1]");
  EmbeddingMap e;
  e.kind_ = EmbeddingKind::MazurPower;
  e.gamma_ = gamma;
  return e;
}

EmbeddingMap EmbeddingMap::orlicz_kaczmarz(OrliczFunction phi) {
  phi.validate();
  EmbeddingMap e;
  e.kind_ = EmbeddingKind::OrliczKaczmarz;
  e.orlicz_ = std::move(phi);
  return e;
}

std::string EmbeddingMap::name() const {
  switch (kind_) {
    case EmbeddingKind::Identity: return "identity";
    case EmbeddingKind::MazurPower: return "mazur(gamma=" + fmt(gamma_) + ")";
    case EmbeddingKind::OrliczKaczmarz: return "kaczmarz(" + orlicz_->name + ")";
  }
  return "unknown";
}

Point EmbeddingMap::forward(const Point& h) const {
  switch (kind_) {
    case EmbeddingKind::Identity: return h;
    case EmbeddingKind::MazurPower: {
      if (h.is_matrix()) return Point(spectral::signed_power(h.mat(), gamma_));
      const double g = gamma_;
      return Point(Eigen::VectorXd(h.vec().unaryExpr([g](double x) {
        return x == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(x), g), x);
      })));
    }
    case EmbeddingKind::OrliczKaczmarz: {
      if (h.is_matrix()) throw ArgumentError("kaczmarz map: classical (vector) states only");
      const OrliczFunction& phi = *orlicz_;
      return Point(Eigen::VectorXd(h.vec().unaryExpr(
          [&phi](double x) { return std::copysign(phi.inverse_at(std::abs(x)), x); })));
    }
  }
  return h;
}

Point EmbeddingMap::inverse(const Point& z) const {
  switch (kind_) {
    case EmbeddingKind::Identity: return z;
    case EmbeddingKind::MazurPower: {
      const double p = 1.0 / gamma_;
      if (z.is_matrix()) return Point(spectral::signed_power(z.mat(), p));
      return Point(Eigen::VectorXd(z.vec().unaryExpr([p](double x) {
        return x == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(x), p), x);
      })));
    }
    case EmbeddingKind::OrliczKaczmarz: {
      if (z.is_matrix()) throw ArgumentError("kaczmarz map: classical (vector) states only");
      const OrliczFunction& phi = *orlicz_;
      return Point(Eigen::VectorXd(
          z.vec().unaryExpr([&phi](double x) { return std::copysign(phi.value(x), x); })));
    }
  }
  return z;
}

std::string DivergenceSpec::name() const {
  if (embedding.is_identity()) return "D[" + potential.name() + "]";
  return "D[" + embedding.name() + "," + potential.name() + "]";
}

// ---------------------------------------------------------------------------
// Divergences

ExtendedReal bregman_divergence(const Potential& p, const Point& z, const Point& w) {
  require_ambient(z, p.ambient(), "bregman_divergence");
  require_ambient(w, p.ambient(), "bregman_divergence");
  // the entropy formula is exact on the whole open orthant, below the
  // interior threshold too; true boundary points keep the +inf convention
  const bool open_entropy = p.kind() == PotentialKind::NegativeEntropy && !p.is_conjugate() &&
                            w.vec().minCoeff() > 0.0;
  if (!p.in_interior(w) && !open_entropy) return ExtendedReal::infinity();
  if (!p.in_domain(z)) return ExtendedReal::infinity();
  double special = 0.0;
  if (p.specialised_divergence(z, w, special)) return special;
  const ExtendedReal pz = p.eval(z);
  if (pz.is_infinite()) return pz;
  const double pw = p.eval(w).value();
  return pz.value() - pw - inner(z - w, p.grad(w));
}

ExtendedReal embedded_divergence(const DivergenceSpec& spec, const Point& phi, const Point& psi) {
  Point a, b;
  try {
    a = spec.embedding.forward(phi);
    b = spec.embedding.forward(psi);
  } catch (const DomainError& e) {
    throw DomainError(std::string("embedded_divergence: embedding domain violation: ") + e.what());
  }
  return bregman_divergence(spec.potential, a, b);
}

ExtendedReal umegaki_d1(const Point& rho, const Point& sigma) {
  require_same_ambient(rho, sigma, "umegaki_d1");
  require_positive(rho, "umegaki_d1");
  require_positive(sigma, "umegaki_d1");
  if (total(rho) > 1.0 + 1e-9 || total(sigma) > 1.0 + 1e-9)
    throw ArgumentError("umegaki_d1: trace exceeds 1");
  if (!support_contained(rho, sigma)) return ExtendedReal::infinity();
  if (rho.is_vector()) {
    const auto& r = rho.vec();
    const auto& s = sigma.vec();
    double v = 0.0;
    for (Eigen::Index i = 0; i < r.size(); ++i) {
      if (r(i) > 0.0) v += r(i) * (std::log(r(i)) - std::log(std::max(s(i), kSupport)));
      v += s(i) - r(i);
    }
    return v;
  }
  const auto er = spectral::eigh(rho.mat());
  const auto es = spectral::eigh(sigma.mat());
  double v = 0.0;
  for (double l : er.values) v += spectral::xlogx(std::max(l, 0.0));
  for (Eigen::Index j = 0; j < es.values.size(); ++j) {
    if (es.values(j) <= kSupport) continue;
    const auto u = es.vectors.col(j);
    v -= (u.adjoint() * rho.mat() * u)(0, 0).real() * std::log(es.values(j));
  }
  return v - total(rho) + total(sigma);
}

ExtendedReal d_gamma(const Point& omega, const Point& phi, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ArgumentError("d_gamma: gamma must lie in ]0,1[");
  require_same_ambient(omega, phi, "d_gamma");
  require_positive(omega, "d_gamma");
  require_positive(phi, "d_gamma");
  if (!support_contained(omega, phi)) return ExtendedReal::infinity();
  const double linear = gamma * total(omega) + (1.0 - gamma) * total(phi);
  return (linear - trace_power_product(omega, phi, gamma)) / (gamma * (1.0 - gamma));
}

ExtendedReal d_gamma_beta(const Point& omega, const Point& phi, double gamma, double beta) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ArgumentError("d_gamma_beta: gamma must lie in ]0,1[");
  if (!(beta > 0.0 && beta < 1.0)) throw ArgumentError("d_gamma_beta: beta must lie in ]0,1[");
  require_same_ambient(omega, phi, "d_gamma_beta");
  require_positive(omega, "d_gamma_beta");
  require_positive(phi, "d_gamma_beta");
  if (!support_contained(omega, phi)) return ExtendedReal::infinity();
  const DivergenceSpec spec(Potential::power_gauge(beta, omega.ambient()),
                            EmbeddingMap::mazur_power(gamma));
  return embedded_divergence(spec, omega, phi);
}

ExtendedReal d_gamma_beta_printed_form(const Point& omega, const Point& phi, double gamma,
                                       double beta) {
  if (!(gamma > 0.0 && gamma < 1.0) || !(beta > 0.0 && beta < 1.0))
    throw ArgumentError("d_gamma_beta: parameters must lie in ]0,1[");
  require_same_ambient(omega, phi, "d_gamma_beta");
  if (!support_contained(omega, phi)) return ExtendedReal::infinity();
  const double tw = total(omega), tf = total(phi);
  const double e = gamma / beta;
  return std::pow(tw, e) + std::pow(tf, e) / (1.0 - beta) -
         std::pow(tf, e - 1.0) * trace_power_product(omega, phi, gamma) / beta;
}

ExtendedReal orlicz_divergence(const OrliczFunction& phi, const Gauge& gauge,
                               const Eigen::VectorXd& omega, const Eigen::VectorXd& psi) {
  if (omega.size() != psi.size()) throw ArgumentError("orlicz_divergence: dimension mismatch");
  const DivergenceSpec spec(Potential::orlicz_gauge(phi, gauge, omega.size()),
                            EmbeddingMap::orlicz_kaczmarz(phi));
  return embedded_divergence(spec, Point(omega), Point(psi));
}

double orlicz_printed_form(const OrliczFunction& phi, double beta, const Eigen::VectorXd& omega,
                           const Eigen::VectorXd& psi) {
  if (!phi.derivative) throw ArgumentError("orlicz_printed_form: Phi' is required");
  const auto bar = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i)
      s += phi.inverse_at(a(i)) * phi.derivative(phi.inverse_at(b(i)));
    return s;
  };
  return 1.0 / beta - (1.0 / beta) * bar(omega, psi) / bar(psi, psi);
}

Divergence Divergence::from_spec(const DivergenceSpec& spec) {
  return {spec.name(), [spec](const Point& a, const Point& b) {
            return embedded_divergence(spec, a, b);
          }};
}

Divergence Divergence::umegaki() {
  return {"D_1", [](const Point& a, const Point& b) { return umegaki_d1(a, b); }};
}

Divergence Divergence::gamma(double g) {
  return {"D_gamma(" + fmt(g) + ")",
          [g](const Point& a, const Point& b) { return d_gamma(a, b, g); }};
}

Divergence Divergence::gamma_beta(double g, double b) {
  return {"D_gamma_beta(" + fmt(g) + "," + fmt(b) + ")",
          [g, b](const Point& x, const Point& y) { return d_gamma_beta(x, y, g, b); }};
}

}  // namespace bregman
