#pragma once

#include <string>

#include "bregman/errors.hpp"

namespace bregman {

/// A value in ]-inf, +inf]: either a finite real or +infinity.
///
/// Infinity is a tag, not a floating sentinel; value() on an infinite
/// ExtendedReal throws.
class ExtendedReal {
 public:
  constexpr ExtendedReal() = default;
  constexpr ExtendedReal(double v) : value_(v) {}  // NOLINT: finite by construction

  static constexpr ExtendedReal infinity() {
    ExtendedReal r;
    r.infinite_ = true;
    return r;
  }

  constexpr bool is_finite() const { return !infinite_; }
  constexpr bool is_infinite() const { return infinite_; }

  double value() const {
    if (infinite_) throw DomainError("extended real is +inf");
    return value_;
  }
  /// Finite value, or `fallback` when infinite.
  constexpr double value_or(double fallback) const { return infinite_ ? fallback : value_; }

  friend constexpr bool operator==(const ExtendedReal& a, const ExtendedReal& b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
    return a.value_ == b.value_;
  }
  friend constexpr bool operator<(const ExtendedReal& a, const ExtendedReal& b) {
    if (a.infinite_) return false;
    if (b.infinite_) return true;
    return a.value_ < b.value_;
  }
  friend constexpr bool operator<=(const ExtendedReal& a, const ExtendedReal& b) {
    return !(b < a);
  }
  friend constexpr bool operator>(const ExtendedReal& a, const ExtendedReal& b) { return b < a; }
  friend constexpr bool operator>=(const ExtendedReal& a, const ExtendedReal& b) {
    return !(a < b);
  }
  friend constexpr ExtendedReal operator+(const ExtendedReal& a, const ExtendedReal& b) {
    if (a.infinite_ || b.infinite_) return infinity();
    return a.value_ + b.value_;
  }

  std::string to_string() const;

 private:
  double value_ = 0.0;
  bool infinite_ = false;
};

}  // namespace bregman
