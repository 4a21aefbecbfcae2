#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "svarid/identifier.hpp"

namespace svarid::cli {

using Json = nlohmann::ordered_json;

Json to_json(const Matrix& m);
Json to_json(const Vector& v);
Json to_json(const ColumnDiagnostic& d);
Json to_json(const CountCondition& cc);
Json to_json(const CrossCheckResult& t);
Json to_json(const RedundancyExplanation& e, const RestrictionSpec& spec);

/// Fields shared by every command: command, spec, n, p, q, permutation.
Json header_json(const std::string& command, const std::string& spec_path, const RestrictionSpec& spec,
                 const CompiledRestrictions& c);

Json check_json(const std::string& spec_path, const RestrictionSpec& spec, const IdentificationReport& report,
                const std::optional<CrossCheckResult>& cross, const std::optional<RedundancyExplanation>& explanation);

/// Compact %g rendering for text reports; "-0" is printed as "0".
std::string fmt_num(double x, int precision = 6);

/// Matrix rows as indented, right-aligned columns.
std::string pretty_matrix(const Matrix& m, const std::string& indent = "    ", int precision = 6);

/// "(1, 0, 0)"
std::string pretty_vector(const Vector& v, int precision = 6);

}  // namespace svarid::cli
