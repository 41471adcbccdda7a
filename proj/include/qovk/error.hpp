#pragma once

#include <stdexcept>
#include <string>

namespace qovk {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand dimensions do not fit the operation.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Requested dimension exceeds the configured maximum.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// A linear system could not be solved; carries the offending eigenvalue.
class SingularityError : public Error {
 public:
  SingularityError(const std::string& what, double min_eigenvalue)
      : Error(what), min_eigenvalue_(min_eigenvalue) {}
  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

/// An object fails the structural checks of its representation.
class ValidityError : public Error {
 public:
  using Error::Error;
};

/// Post-selection on an outcome whose probability is numerically zero.
class PostselectionError : public Error {
 public:
  PostselectionError(const std::string& what, double probability)
      : Error(what), probability_(probability) {}
  double probability() const noexcept { return probability_; }

 private:
  double probability_;
};

}  // namespace qovk
