#pragma once

#include <stdexcept>
#include <string>

namespace bregman {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed call: dimension or kind mismatch, parameter out of range.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// A point lies outside the (interior of the) effective domain it needs.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An object was rejected at construction (non-Legendre potential,
/// non-Orlicz function, invalid theory, ...).
class ConstructionError : public Error {
 public:
  using Error::Error;
};

/// An internal numerical tolerance could not be met.
class ToleranceError : public Error {
 public:
  using Error::Error;
};

}  // namespace bregman
