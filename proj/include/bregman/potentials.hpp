#pragma once

#include <functional>
#include <memory>
#include <string>

#include "bregman/extended_real.hpp"
#include "bregman/point.hpp"

namespace bregman {

/// Strictly increasing continuous map phi: R+ -> R+ with phi(0) = 0.
///
/// The inverse and the antiderivative int_0^s phi are optional; missing
/// ones are computed numerically (Newton with bisection fallback, resp.
/// adaptive Simpson at absolute tolerance 1e-10).
class Gauge {
 public:
  using Fn = std::function<double(double)>;

  explicit Gauge(Fn forward, Fn inverse = {}, Fn antiderivative = {});

  /// c * t^e.  Closed-form inverse and antiderivative.
  static Gauge power(double coefficient, double exponent);
  static Gauge linear() { return power(1.0, 1.0); }

  double operator()(double t) const { return forward_(t); }
  double inverse(double r) const;
  /// int_0^s phi(t) dt
  double profile(double s) const;
  /// Legendre transform of the profile: sup_s (r s - profile(s)).
  double profile_conjugate(double r) const;

  bool has_closed_inverse() const { return static_cast<bool>(inverse_); }
  bool has_closed_profile() const { return static_cast<bool>(antiderivative_); }

  /// Throws ConstructionError when phi(0) != 0, when phi is not strictly
  /// increasing on samples, or when phi(inverse(t)) drifts from t by more
  /// than 1e-10 on [0, 1e3].
  void validate() const;

 private:
  Fn forward_;
  Fn inverse_;
  Fn antiderivative_;
};

/// Even convex Phi: R -> R with Phi(0) = 0, not identically zero.
struct OrliczFunction {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  /// Inverse of Phi on [0, inf); optional (numerical otherwise).
  std::function<double(double)> inverse;
  std::string name = "custom";

  static OrliczFunction power(double p);     // |t|^p, p > 1
  static OrliczFunction exp_minus_one();     // e^|t| - 1
  static OrliczFunction cosh_minus_one();    // cosh t - 1

  double inverse_at(double h) const;
  /// Sampled convexity / evenness / Phi(0) = 0 check; throws ConstructionError.
  void validate() const;
};

/// inf { lambda > 0 : sum_i Phi(|x_i| / lambda) <= 1 }, bisection to 1e-10.
double luxemburg_norm(const OrliczFunction& phi, const Eigen::VectorXd& x);

enum class PotentialKind {
  Euclidean,
  NegativeEntropy,
  PowerGauge,
  NormGauge,
  OrliczGauge,
  SpectralVonNeumann,
  SpectralPower,
};

std::string to_string(PotentialKind kind);

/// Declared analytic hypotheses; not verified numerically.
struct AdaptednessFlags {
  bool lsq_adapted = false;
  bool rsq_adapted = false;
};

/// Implementation interface for one potential family.
class PotentialModel {
 public:
  virtual ~PotentialModel() = default;
  virtual PotentialKind kind() const = 0;
  virtual Ambient ambient() const = 0;
  virtual std::string name() const = 0;
  virtual AdaptednessFlags flags() const { return {}; }

  virtual bool in_domain(const Point& x) const = 0;
  virtual bool in_interior(const Point& x) const = 0;
  /// Empty when x is interior, else a description of the violated constraint.
  virtual std::string interior_violation(const Point& x) const;
  virtual double value(const Point& x) const = 0;  // x in domain
  virtual Point gradient(const Point& x) const = 0;  // x interior

  virtual bool in_conjugate_interior(const Point& y) const = 0;
  virtual double conjugate_value(const Point& y) const = 0;
  virtual Point conjugate_gradient(const Point& y) const = 0;

  /// Optional specialised Bregman divergence (for numerical stability).
  /// Returns false when the generic formula should be used.
  virtual bool divergence(const Point&, const Point&, double&) const { return false; }
};

/// A Legendre potential Psi, or its Fenchel conjugate Psi*.
///
/// Immutable; copies share the model.  conjugate() swaps the roles of
/// (Psi, grad Psi) and (Psi*, grad Psi*), so grad of the conjugate is
/// (grad Psi)^{-1}.
class Potential {
 public:
  static Potential euclidean(const Ambient& ambient);
  static Potential euclidean(Eigen::Index dim) { return euclidean(Ambient::vector(dim)); }
  static Potential negative_entropy(Eigen::Index dim);
  /// beta * ||x||^{1/beta}, gauge phi(t) = t^{1/beta - 1}, beta in ]0,1[.
  static Potential power_gauge(double beta, const Ambient& ambient);
  static Potential power_gauge(double beta, Eigen::Index dim) {
    return power_gauge(beta, Ambient::vector(dim));
  }
  /// int_0^{||x||_Phi} phi over the Luxemburg norm of Phi.
  static Potential orlicz_gauge(const OrliczFunction& phi, const Gauge& gauge, Eigen::Index dim);
  /// Tr(h log h - h) on hermitian side x side matrices.
  static Potential spectral_von_neumann(Eigen::Index side);
  /// beta * ||h||_F^{1/beta} on hermitian matrices; gamma records the Mazur
  /// exponent it is paired with.
  static Potential spectral_power(double gamma, double beta, Eigen::Index side);

  PotentialKind kind() const { return model_->kind(); }
  Ambient ambient() const { return model_->ambient(); }
  bool is_conjugate() const { return dual_; }
  std::string name() const;
  AdaptednessFlags flags() const { return model_->flags(); }
  const PotentialModel& model() const { return *model_; }

  Potential conjugate() const;

  bool in_domain(const Point& x) const;
  bool in_interior(const Point& x) const;

  /// Psi(x); +inf outside the effective domain.
  ExtendedReal eval(const Point& x) const;
  /// grad Psi(x); DomainError naming the violated constraint off int dom.
  Point grad(const Point& x) const;
  ExtendedReal conjugate_eval(const Point& y) const;
  Point conjugate_grad(const Point& y) const;
  bool in_conjugate_interior(const Point& y) const;

  /// Stable closed form of D_Psi(z, w) for z in dom, w in int dom, if any.
  bool specialised_divergence(const Point& z, const Point& w, double& out) const;

  friend bool same_potential(const Potential& a, const Potential& b) {
    return a.model_ == b.model_ && a.dual_ == b.dual_;
  }

 private:
  Potential(std::shared_ptr<const PotentialModel> model, bool dual)
      : model_(std::move(model)), dual_(dual) {}
  friend Potential make_gauge_potential(const Gauge&, double, Eigen::Index);

  std::shared_ptr<const PotentialModel> model_;
  bool dual_ = false;
};

/// Psi_phi = int_0^{||.||_p} phi.  Only p = 2 is accepted (gradients of
/// norm gauges are radial only for the Euclidean norm).
Potential make_gauge_potential(const Gauge& gauge, double norm_exponent, Eigen::Index dim);

}  // namespace bregman
