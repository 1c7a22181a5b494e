#pragma once

#include <stdexcept>
#include <string>

namespace gdh {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or schema-violating input file.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Caller violated an operation's documented precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A configured size cap (grid points, dense entries, mask cells) was exceeded.
class ResourceError : public Error {
 public:
  using Error::Error;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Floating-point range problem (exponential weights that would under/overflow).
class RangeError : public Error {
 public:
  using Error::Error;
};

}  // namespace gdh
