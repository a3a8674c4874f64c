#pragma once

#include <functional>
#include <optional>
#include <string>

#include "bregman/extended_real.hpp"
#include "bregman/point.hpp"
#include "bregman/potentials.hpp"

namespace bregman {

enum class EmbeddingKind { Identity, MazurPower, OrliczKaczmarz };

/// Invertible coordinate map l from states into the potential's space.
///
/// MazurPower(gamma): sign(h)|h|^gamma componentwise, or on eigenvalues
/// for hermitian matrices.  OrliczKaczmarz(Phi): sign(h) Phi^{-1}(|h|)
/// componentwise, vectors only.
class EmbeddingMap {
 public:
  EmbeddingMap() = default;
  static EmbeddingMap identity() { return {}; }
  static EmbeddingMap mazur_power(double gamma);
  static EmbeddingMap orlicz_kaczmarz(OrliczFunction phi);

  EmbeddingKind kind() const { return kind_; }
  double gamma() const { return gamma_; }
  const OrliczFunction& orlicz() const { return *orlicz_; }
  bool is_identity() const { return kind_ == EmbeddingKind::Identity; }
  std::string name() const;

  Point forward(const Point& h) const;
  Point inverse(const Point& z) const;

 private:
  EmbeddingKind kind_ = EmbeddingKind::Identity;
  double gamma_ = 1.0;
  std::optional<OrliczFunction> orlicz_;
};

/// D_{l,Psi}: a potential together with an embedding.
struct DivergenceSpec {
  Potential potential;
  EmbeddingMap embedding{};

  explicit DivergenceSpec(Potential p, EmbeddingMap e = {})
      : potential(std::move(p)), embedding(std::move(e)) {}

  Ambient ambient() const { return potential.ambient(); }
  std::string name() const;
};

/// D_Psi(z, w) = Psi(z) - Psi(w) - <z - w, grad Psi(w)>; +inf when
/// w is outside int dom Psi or z outside dom Psi.
ExtendedReal bregman_divergence(const Potential& p, const Point& z, const Point& w);

/// D_Psi(l(phi), l(psi)); the same evaluation path as bregman_divergence.
ExtendedReal embedded_divergence(const DivergenceSpec& spec, const Point& phi, const Point& psi);

/// Umegaki relative entropy Tr(rho (log rho - log sigma) - rho + sigma).
/// Accepts hermitian PSD matrices (or nonnegative vectors, classical case);
/// +inf when supp rho is not inside supp sigma.
ExtendedReal umegaki_d1(const Point& rho, const Point& sigma);

/// (gamma(1-gamma))^{-1} Tr(gamma w + (1-gamma) f - w^gamma f^{1-gamma});
/// +inf unless supp w is inside supp f.
ExtendedReal d_gamma(const Point& omega, const Point& phi, double gamma);

/// D_{gamma,beta}: pullback of the power-gauge (beta) Bregman divergence
/// under the Mazur map (gamma); +inf unless supp omega is inside supp phi.
ExtendedReal d_gamma_beta(const Point& omega, const Point& phi, double gamma, double beta);

/// The closed-form trace expression printed alongside D_{gamma,beta}:
/// tau(w)^{g/b} + tau(f)^{g/b}/(1-b) - tau(f)^{g/b-1} tau(w^g f^{1-g})/b.
/// Advisory only; it does not vanish at omega = phi.
ExtendedReal d_gamma_beta_printed_form(const Point& omega, const Point& phi, double gamma,
                                       double beta);

/// D_{Phi,phi}: pullback through the Kaczmarz map of the gauge potential
/// built on the Luxemburg norm of Phi.
ExtendedReal orlicz_divergence(const OrliczFunction& phi, const Gauge& gauge,
                               const Eigen::VectorXd& omega, const Eigen::VectorXd& psi);

/// 1/b - (1/b) Phibar(w, f) / Phibar(f, f) with
/// Phibar(w, f) = sum Phi^{-1}(w) Phi'(Phi^{-1}(f)).  Advisory only.
double orlicz_printed_form(const OrliczFunction& phi, double beta, const Eigen::VectorXd& omega,
                           const Eigen::VectorXd& psi);

/// Type-erased divergence D(a, b) on states, for sweeps that only need
/// evaluations (certification, deficiency, monotones).
struct Divergence {
  std::string name;
  std::function<ExtendedReal(const Point&, const Point&)> eval;

  ExtendedReal operator()(const Point& a, const Point& b) const { return eval(a, b); }

  static Divergence from_spec(const DivergenceSpec& spec);
  static Divergence umegaki();
  static Divergence gamma(double gamma);
  static Divergence gamma_beta(double gamma, double beta);
};

}  // namespace bregman
