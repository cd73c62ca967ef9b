#pragma once

#include <stdexcept>
#include <string>

namespace vipeg {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Bad argument values, dimension mismatches, out-of-domain parameters.
class InvalidInputError : public Error {
public:
  explicit InvalidInputError(const std::string& what) : Error(what) {}
};

// A requested ingredient is missing (no Lipschitz constant, no smooth part, ...).
class UnsupportedOperationError : public Error {
public:
  explicit UnsupportedOperationError(const std::string& what) : Error(what) {}
};

// The correction loop shrank lambda 200 times without acceptance.
class CorrectionError : public Error {
public:
  explicit CorrectionError(const std::string& what) : Error(what) {}
};

// A backtracking line search hit its trial cap.
class LinesearchError : public Error {
public:
  explicit LinesearchError(const std::string& what) : Error(what) {}
};

// Malformed text input; message carries a 1-based line number where possible.
class ParseError : public Error {
public:
  explicit ParseError(const std::string& what) : Error(what) {}
};

class IoError : public Error {
public:
  explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace vipeg
