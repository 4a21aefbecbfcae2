#include "svarid/error.hpp"

namespace svarid {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::NotSymmetric: return "NotSymmetric";
    case Errc::NotPositiveDefinite: return "NotPositiveDefinite";
    case Errc::SingularA0: return "SingularA0";
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::UnknownBlock: return "UnknownBlock";
    case Errc::DuplicateBlock: return "DuplicateBlock";
    case Errc::PreconditionCountFailure: return "PreconditionCountFailure";
    case Errc::Infeasible: return "Infeasible";
    case Errc::NotInR: return "NotInR";
  }
  return "Unknown";
}

std::string ParseError::format_message(const std::string& what, int line, int column) {
  if (line <= 0) return what;
  std::string out = "line " + std::to_string(line);
  if (column > 0) out += ", column " + std::to_string(column);
  return out + ": " + what;
}

}  // namespace svarid
