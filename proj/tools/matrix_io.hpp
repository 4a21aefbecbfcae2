#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "svarid/numkernel.hpp"

namespace svarid::cli {

/// Plain-text matrix: one row per line, whitespace-separated decimal
/// literals.  Blank lines and '#' comments are ignored.
Matrix parse_matrix(std::string_view text, const std::string& origin = "<input>");
Matrix read_matrix_file(const std::filesystem::path& path);

/// Inverse of parse_matrix; values are printed with round-trip precision.
std::string format_matrix(const Matrix& m);

}  // namespace svarid::cli
