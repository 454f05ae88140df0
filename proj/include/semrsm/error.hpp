#pragma once

#include <stdexcept>
#include <string>

namespace semrsm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed file contents (bad NPY header, unparsable sidecar JSON).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Data that parses but violates an invariant (NaN entries, duplicate ids).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Tensor or matrix dimensions that do not fit the operation.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Filesystem failure while reading or writing.
class IoError : public Error {
 public:
  using Error::Error;
};

/// A parameter outside its documented domain (sigma <= 0, k > S, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace semrsm
