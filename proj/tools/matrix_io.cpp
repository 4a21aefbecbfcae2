#include "matrix_io.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "svarid/error.hpp"

namespace svarid::cli {

Matrix parse_matrix(std::string_view text, const std::string& origin) {
  std::vector<std::vector<double>> rows;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

    std::vector<double> row;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      const std::size_t start = i;
      while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      if (i == start) break;
      const char* first = line.data() + start;
      const char* last = line.data() + i;
      if (*first == '+') ++first;
      double value = 0.0;
      auto [ptr, ec] = std::from_chars(first, last, value);
      if (ec != std::errc() || ptr != last)
        throw ParseError(Errc::SyntaxError,
                         origin + ": invalid number '" + std::string(line.substr(start, i - start)) + "'", line_no,
                         static_cast<int>(start) + 1);
      row.push_back(value);
    }
    if (row.empty()) continue;
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError(Errc::DimensionMismatch, origin + ": ragged matrix rows", line_no, 0);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(Errc::DimensionMismatch, origin + ": empty matrix");

  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  if (!m.allFinite()) throw Error(Errc::InvalidArgument, origin + ": non-finite entry");
  return m;
}

Matrix read_matrix_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::InvalidArgument, "cannot open matrix file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_matrix(buf.str(), path.string());
}

std::string format_matrix(const Matrix& m) {
  std::string out;
  char buf[64];
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", m(r, c));
      if (c > 0) out += ' ';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace svarid::cli
