#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace svarid {

enum class Errc {
  InvalidArgument,
  NotSymmetric,
  NotPositiveDefinite,
  SingularA0,
  SyntaxError,
  DimensionMismatch,
  UnknownBlock,
  DuplicateBlock,
  PreconditionCountFailure,
  Infeasible,
  NotInR,
};

std::string_view to_string(Errc code) noexcept;

/// Base exception for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Restriction-spec parse failure; line and column are 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(Errc code, const std::string& what, int line, int column)
      : Error(code, format_message(what, line, column)), line_(line), column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  static std::string format_message(const std::string& what, int line, int column);

  int line_;
  int column_;
};

}  // namespace svarid
