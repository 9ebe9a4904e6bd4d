#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sugra {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ParseErrorKind { Syntax, UnknownIdentifier, MalformedExponent };

class ParseError : public Error {
 public:
  ParseError(ParseErrorKind kind, std::size_t position, const std::string& what)
      : Error(what + " at position " + std::to_string(position)),
        kind_(kind),
        position_(position) {}

  ParseErrorKind kind() const { return kind_; }
  std::size_t position() const { return position_; }

 private:
  ParseErrorKind kind_;
  std::size_t position_;
};

// Thrown for chart/degree/block violations when combining objects.
class StructureError : public Error {
 public:
  using Error::Error;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

// Bad user input: unknown catalog id, malformed background file, bad flag.
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace sugra
