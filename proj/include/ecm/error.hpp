#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ecm {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Missing or unreadable input file.
class IoError : public Error {
 public:
  using Error::Error;
};

// Input document does not follow the expected shape (wrong key, wrong type).
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Input is well formed but violates a model invariant.
class InvariantError : public Error {
 public:
  using Error::Error;
};

// Operation called with arguments outside its domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace ecm
