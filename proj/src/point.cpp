#include "bregman/point.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "bregman/errors.hpp"
#include "bregman/extended_real.hpp"

namespace bregman {

std::string ExtendedReal::to_string() const {
  if (infinite_) return "+inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value_);
  return buf;
}

Ambient Point::ambient() const {
  if (is_vector()) return Ambient::vector(vec().size());
  return Ambient::matrix(mat().rows());
}

const Eigen::VectorXd& Point::vec() const {
  if (!is_vector()) throw ArgumentError("expected a vector point, got a matrix");
  return std::get<0>(data_);
}
const Eigen::MatrixXcd& Point::mat() const {
  if (!is_matrix()) throw ArgumentError("expected a matrix point, got a vector");
  return std::get<1>(data_);
}
Eigen::VectorXd& Point::vec() {
  if (!is_vector()) throw ArgumentError("expected a vector point, got a matrix");
  return std::get<0>(data_);
}
Eigen::MatrixXcd& Point::mat() {
  if (!is_matrix()) throw ArgumentError("expected a matrix point, got a vector");
  return std::get<1>(data_);
}

namespace {

void require_same(const Point& a, const Point& b, const char* what) {
  if (!(a.ambient() == b.ambient()))
    throw ArgumentError(std::string(what) + ": points live in different ambient spaces");
}

}  // namespace

Point& Point::operator+=(const Point& other) {
  require_same(*this, other, "operator+");
  if (is_vector())
    vec() += other.vec();
  else
    mat() += other.mat();
  return *this;
}

Point& Point::operator-=(const Point& other) {
  require_same(*this, other, "operator-");
  if (is_vector())
    vec() -= other.vec();
  else
    mat() -= other.mat();
  return *this;
}

Point& Point::operator*=(double s) {
  if (is_vector())
    vec() *= s;
  else
    mat() *= s;
  return *this;
}

Point operator+(Point a, const Point& b) { return a += b; }
Point operator-(Point a, const Point& b) { return a -= b; }
Point operator*(double s, Point a) { return a *= s; }
Point operator*(Point a, double s) { return a *= s; }

double inner(const Point& a, const Point& b) {
  require_same(a, b, "inner");
  if (a.is_vector()) return a.vec().dot(b.vec());
  // Re Tr(a^H b) = Re sum conj(a_ij) b_ij
  return (a.mat().conjugate().cwiseProduct(b.mat())).sum().real();
}

double norm(const Point& a) {
  if (a.is_vector()) return a.vec().norm();
  return a.mat().norm();
}

double distance(const Point& a, const Point& b) { return norm(a - b); }

Point zero_like(const Point& a) { return zero_point(a.ambient()); }

Point zero_point(const Ambient& ambient) {
  if (ambient.kind == PointKind::Vector) return Point(Eigen::VectorXd(Eigen::VectorXd::Zero(ambient.dim)));
  return Point(Eigen::MatrixXcd(Eigen::MatrixXcd::Zero(ambient.dim, ambient.dim)));
}

Eigen::VectorXd coords(const Point& p) {
  if (p.is_vector()) return p.vec();
  const auto& m = p.mat();
  const Eigen::Index d = m.rows();
  Eigen::VectorXd c(d * d);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < d; ++i) c(k++) = m(i, i).real();
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i + 1; j < d; ++j) {
      // symmetrised so slightly non-hermitian inputs map consistently
      const std::complex<double> z = 0.5 * (m(i, j) + std::conj(m(j, i)));
      c(k++) = std::sqrt(2.0) * z.real();
      c(k++) = std::sqrt(2.0) * z.imag();
    }
  return c;
}

Point from_coords(const Eigen::VectorXd& c, const Ambient& ambient) {
  if (c.size() != ambient.coordinate_dim())
    throw ArgumentError("from_coords: coordinate count does not match ambient");
  if (ambient.kind == PointKind::Vector) return Point(c);
  const Eigen::Index d = ambient.dim;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < d; ++i) m(i, i) = c(k++);
  const double s = 1.0 / std::sqrt(2.0);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i + 1; j < d; ++j) {
      const std::complex<double> z(s * c(k), s * c(k + 1));
      k += 2;
      m(i, j) = z;
      m(j, i) = std::conj(z);
    }
  return Point(std::move(m));
}

void require_ambient(const Point& p, const Ambient& ambient, const char* what) {
  const Ambient a = p.ambient();
  if (a.kind != ambient.kind)
    throw ArgumentError(std::string(what) + ": point kind does not match (vector vs matrix)");
  if (a.dim != ambient.dim)
    throw ArgumentError(std::string(what) + ": dimension mismatch (got " + std::to_string(a.dim) +
                        ", expected " + std::to_string(ambient.dim) + ")");
}

}  // namespace bregman
