#pragma once

#include <stdexcept>
#include <string>

namespace flowlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree (matrix sides, vector lengths).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An operation was called outside its domain (pole, negative base, bad exponent).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation is violated by the caller.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Text could not be parsed.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Lattice is too deep in the cusp for enumeration.
class CuspError : public Error {
 public:
  using Error::Error;
};

/// Catalog file is missing, malformed, or lacks the requested map.
class CatalogError : public Error {
 public:
  using Error::Error;
};

/// An internal consistency check failed; indicates a bug rather than bad input.
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace flowlab
