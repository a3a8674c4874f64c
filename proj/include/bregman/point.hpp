#pragma once

#include <variant>

#include <Eigen/Dense>

namespace bregman {

enum class PointKind { Vector, Matrix };

/// Ambient space of a state: R^n, or hermitian n x n matrices.
struct Ambient {
  PointKind kind = PointKind::Vector;
  Eigen::Index dim = 0;

  static Ambient vector(Eigen::Index n) { return {PointKind::Vector, n}; }
  static Ambient matrix(Eigen::Index side) { return {PointKind::Matrix, side}; }

  /// Number of real coordinates (n, or side^2 for hermitian matrices).
  Eigen::Index coordinate_dim() const { return kind == PointKind::Vector ? dim : dim * dim; }

  friend bool operator==(const Ambient&, const Ambient&) = default;
};

/// A state: a real vector or a hermitian matrix.
///
/// Both kinds share the real inner product <a,b> = sum a_i b_i, resp.
/// Re Tr(a b), so every potential and set sees a real Hilbert space.
class Point {
 public:
  Point() = default;
  explicit Point(Eigen::VectorXd v) : data_(std::move(v)) {}
  explicit Point(Eigen::MatrixXcd m) : data_(std::move(m)) {}

  PointKind kind() const { return data_.index() == 0 ? PointKind::Vector : PointKind::Matrix; }
  bool is_vector() const { return data_.index() == 0; }
  bool is_matrix() const { return data_.index() == 1; }
  Ambient ambient() const;

  const Eigen::VectorXd& vec() const;
  const Eigen::MatrixXcd& mat() const;
  Eigen::VectorXd& vec();
  Eigen::MatrixXcd& mat();

  Point& operator+=(const Point& other);
  Point& operator-=(const Point& other);
  Point& operator*=(double s);

 private:
  std::variant<Eigen::VectorXd, Eigen::MatrixXcd> data_{Eigen::VectorXd()};
};

Point operator+(Point a, const Point& b);
Point operator-(Point a, const Point& b);
Point operator*(double s, Point a);
Point operator*(Point a, double s);

double inner(const Point& a, const Point& b);
double norm(const Point& a);
double distance(const Point& a, const Point& b);
Point zero_like(const Point& a);
Point zero_point(const Ambient& ambient);

/// Orthonormal real coordinates: the vector itself, or the hermitian
/// coordinates (diagonal, sqrt2*Re, sqrt2*Im of the upper triangle).
Eigen::VectorXd coords(const Point& p);
Point from_coords(const Eigen::VectorXd& c, const Ambient& ambient);

/// Throws ArgumentError unless `p` lives in `ambient`.
void require_ambient(const Point& p, const Ambient& ambient, const char* what);

}  // namespace bregman
