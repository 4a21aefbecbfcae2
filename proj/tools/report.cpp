#include "report.hpp"

#include <cstdio>

namespace svarid::cli {

Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json to_json(const ColumnDiagnostic& d) {
  Json j;
  j["j"] = d.j;
  j["column"] = d.column;
  j["rank"] = d.rank;
  j["required"] = d.required_rank;
  j["status"] = std::string(to_string(d.status));
  j["null_dimension"] = d.null_dimension;
  j["qtilde_rows"] = d.qtilde_rows;
  j["singular_values"] = to_json(d.singular_values);
  return j;
}

Json to_json(const CountCondition& cc) {
  Json j;
  j["per_column"] = cc.per_column;
  j["overall"] = cc.overall;
  return j;
}

Json to_json(const CrossCheckResult& t) {
  Json j;
  j["ranks"] = t.ranks;
  j["total_restrictions"] = t.total_restrictions;
  j["required"] = t.total_required;
  j["pass"] = t.pass;
  return j;
}

Json to_json(const RedundancyExplanation& e, const RestrictionSpec& spec) {
  Json j;
  j["j"] = e.j;
  j["column"] = e.column;
  j["rank"] = e.rank;
  j["required"] = e.required_rank;
  Json implied = Json::array();
  for (const auto& item : e.implied) {
    Json entry;
    entry["cell"] = describe(item.cell, spec);
    Json by = Json::array();
    for (const auto& cell : item.implied_by) by.push_back(describe(cell, spec));
    entry["implied_by"] = std::move(by);
    implied.push_back(std::move(entry));
  }
  j["implied"] = std::move(implied);
  return j;
}

Json header_json(const std::string& command, const std::string& spec_path, const RestrictionSpec& spec,
                 const CompiledRestrictions& c) {
  Json j;
  j["command"] = command;
  j["spec"] = spec_path;
  j["n"] = spec.dims.n;
  j["p"] = spec.dims.p;
  j["q"] = c.q;
  Json perm = Json::array();
  for (int original : c.permutation) perm.push_back(original + 1);
  j["permutation"] = std::move(perm);
  return j;
}

Json check_json(const std::string& spec_path, const RestrictionSpec& spec, const IdentificationReport& report,
                const std::optional<CrossCheckResult>& cross, const std::optional<RedundancyExplanation>& explanation) {
  Json j = header_json("check", spec_path, spec, report.compiled);
  j["count_condition"] = to_json(report.count);
  j["total_restrictions"] = report.total_restrictions;
  j["required"] = report.total_required;
  Json draws = Json::array();
  for (const auto& d : report.draws) {
    Json dj;
    dj["seed"] = d.seed;
    dj["index"] = d.index;
    Json cols = Json::array();
    for (const auto& c : d.rotation.per_column) cols.push_back(to_json(c));
    dj["columns"] = std::move(cols);
    dj["pass"] = d.pass;
    draws.push_back(std::move(dj));
  }
  j["draws"] = std::move(draws);
  if (cross) j["rank_cross_check"] = to_json(*cross);
  if (explanation) j["redundancy"] = to_json(*explanation, spec);
  if (!report.note.empty()) j["note"] = report.note;
  j["verdict"] = std::string(to_string(report.verdict));
  return j;
}

std::string fmt_num(double x, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, x);
  std::string s = buf;
  // Collapse negative zero so output does not depend on rounding noise.
  if (s == "-0") s = "0";
  return s;
}

std::string pretty_matrix(const Matrix& m, const std::string& indent, int precision) {
  const std::size_t width = static_cast<std::size_t>(precision) + 8;
  std::string out;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    out += indent;
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      std::string cell = fmt_num(m(r, c), precision);
      if (cell.size() < width) cell.insert(0, width - cell.size(), ' ');
      out += cell;
    }
    out += '\n';
  }
  return out;
}

std::string pretty_vector(const Vector& v, int precision) {
  std::string out = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) out += ", ";
    out += fmt_num(v(i), precision);
  }
  return out + ")";
}

}  // namespace svarid::cli
