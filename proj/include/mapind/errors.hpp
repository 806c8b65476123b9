#pragma once

#include <stdexcept>
#include <string>

namespace mapind {

// Every failure raised by the library derives from Error. The CLI maps the
// concrete type onto its exit code, so new failure classes should extend one
// of the types below rather than Error directly.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text: JSON documents, formulas, fractions, CLI values.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}
  explicit ParseError(const std::string& what) : Error(what) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_ = 0;
};

// The network violates a structural invariant (cycle, bad CPT, dangling
// reference) or an operation that requires a valid network was handed one.
class NetworkError : public Error {
 public:
  using Error::Error;
};

// A query names unknown variables or states, or its sets overlap.
class QueryError : public Error {
 public:
  using Error::Error;
};

// Conditioning on a probability-zero event.
class InfeasibleQueryError : public Error {
 public:
  using Error::Error;
};

// A configured enumeration guard would be exceeded.
class CapacityError : public Error {
 public:
  using Error::Error;
};

}  // namespace mapind
