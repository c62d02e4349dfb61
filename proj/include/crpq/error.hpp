#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace crpq {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

/// Malformed textual input (regex, query file, tree pattern, JSON).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const noexcept { return position_; }
  const char* kind() const noexcept override { return "parse"; }

 private:
  std::size_t position_;
};

/// Well-formed but semantically invalid input (unknown letter, arity mismatch, ...).
class InputError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "input"; }
};

/// A hard enumeration or construction cap was exceeded.
class ResourceError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "resource"; }
};

/// The input lies outside the fragment an exact procedure requires.
class FragmentError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "fragment"; }
};

}  // namespace crpq
