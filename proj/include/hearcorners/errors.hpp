#pragma once

#include <stdexcept>
#include <string>

namespace hearcorners {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A domain description violates one of the DomainSpec invariants.
class InvalidDomain : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the mathematical domain of a function
/// (e.g. an opening angle outside (0, 2*pi)).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Root finding, factorization or iteration failed to converge.
class NumericError : public Error {
 public:
  using Error::Error;
};

class MeshError : public Error {
 public:
  using Error::Error;
};

/// The spectrum does not reach far enough to support the requested
/// heat-trace window. Carries the cutoff that would be needed.
class InsufficientSpectrum : public Error {
 public:
  InsufficientSpectrum(const std::string& what, double required_cutoff)
      : Error(what), required_cutoff_(required_cutoff) {}
  double required_cutoff() const noexcept { return required_cutoff_; }

 private:
  double required_cutoff_;
};

class FitError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file (domain, spectrum or report).
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace hearcorners
