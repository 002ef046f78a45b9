#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tsm {

// Base class for every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// A finite value does not fit the configured dynamic range under STRICT policy.
class RangeViolation : public Error {
 public:
  using Error::Error;
};

class UninitializedRegister : public Error {
 public:
  using Error::Error;
};

// A selector vector carries two or more finite elements.
class NotOneHot : public Error {
 public:
  using Error::Error;
};

// A mask element is finite but nonzero; masks are tropically binary {0, inf}.
class NotBinary : public Error {
 public:
  using Error::Error;
};

// An instruction names the same storage as both source and destination.
class HazardViolation : public Error {
 public:
  using Error::Error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, std::size_t position)
      : Error(what), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class UnboundVariable : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class NegativeWeight : public Error {
 public:
  NegativeWeight(const std::string& what, std::size_t line)
      : Error(what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class NodeNotFound : public Error {
 public:
  using Error::Error;
};

class InvalidAlphabet : public Error {
 public:
  using Error::Error;
};

}  // namespace tsm
