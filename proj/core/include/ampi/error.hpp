#pragma once

#include <stdexcept>
#include <string>

namespace ampi {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied argument violates an operation's precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The input is well-formed but carries no usable signal (constant depth,
/// everything masked out, a layer eroded to nothing).
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace ampi
