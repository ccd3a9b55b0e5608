#pragma once

#include <stdexcept>
#include <string>

namespace ddctl {

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite or otherwise malformed input values.
class InputError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A matrix required to be positive definite is indefinite or near-singular.
class DefinitenessError : public Error {
 public:
  using Error::Error;
};

/// A matrix required to be Hurwitz is not.
class StabilityError : public Error {
 public:
  using Error::Error;
};

/// Simulated trajectory left the admissible range.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// The data cannot support the requested fit (rank deficient, empty, eps = 0).
class DegenerateDataError : public Error {
 public:
  using Error::Error;
};

/// An LMI problem was malformed (undeclared variable, duplicate name, ...).
class AssemblyError : public Error {
 public:
  using Error::Error;
};

/// A requested channel combination is not supported (e.g. H != 0 for H2).
class UnsupportedChannelError : public Error {
 public:
  using Error::Error;
};

/// Resolvent (jwI - A_K) is singular.
class PoleOnAxisError : public Error {
 public:
  using Error::Error;
};

}  // namespace ddctl
