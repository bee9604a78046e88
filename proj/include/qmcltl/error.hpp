#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmcltl {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent user input (dimensions, schemas, formulas).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Formula text that does not match the grammar; `position` is a byte offset.
class SyntaxError : public InputError {
 public:
  SyntaxError(const std::string& what, std::size_t position)
      : InputError(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// A computed object drifted beyond the tolerance that allows re-projection.
class NumericalDrift : public Error {
 public:
  using Error::Error;
};

/// An iterative kernel (Schur, SVD) did not converge.
class ConvergenceFailure : public Error {
 public:
  using Error::Error;
};

/// A peripheral eigenvalue cluster has a nontrivial nilpotent part; a CPTP
/// input never produces one.
class DefectivePeripheral : public Error {
 public:
  using Error::Error;
};

/// The eigenbasis is too ill-conditioned to expand a state in it.
class IllConditionedBasis : public Error {
 public:
  IllConditionedBasis(const std::string& what, double condition)
      : Error(what), condition_(condition) {}
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

/// The chain has a contributing peripheral eigenvalue whose angle is not a
/// detectable rational multiple of 2*pi.
class NotPeriodicallyStable : public Error {
 public:
  NotPeriodicallyStable(const std::string& what, std::vector<std::complex<double>> offending)
      : Error(what), offending_(std::move(offending)) {}
  const std::vector<std::complex<double>>& offending() const noexcept { return offending_; }

 private:
  std::vector<std::complex<double>> offending_;
};

/// Too many propositions are ambiguous in one neighborhood to enumerate.
class AmbiguityCapExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace qmcltl
