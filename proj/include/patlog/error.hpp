#pragma once

#include <stdexcept>
#include <string>

namespace patlog {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed automaton or formula text. line is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Formula outside every decidable fragment for the automaton's monoid.
class FragmentError : public Error {
 public:
  using Error::Error;
};

// A configured cap (enumeration size, memo table, subset construction) was hit.
class ResourceError : public Error {
 public:
  using Error::Error;
};

// Integer output overflowed the 64-bit representation.
class OverflowError : public Error {
 public:
  using Error::Error;
};

// A produced witness failed re-verification. Indicates a bug.
class SoundnessError : public Error {
 public:
  using Error::Error;
};

}  // namespace patlog
