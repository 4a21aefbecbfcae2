#include "svarid/restrictions.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>

#include "svarid/error.hpp"

namespace svarid {

// ---------------------------------------------------------------------------
// Block names

std::string BlockId::name() const {
  switch (kind) {
    case Kind::A0: return "A0";
    case Kind::Lag: return "LAG" + std::to_string(index);
    case Kind::IR: return "IR" + std::to_string(index);
  }
  return {};
}

namespace {

std::optional<int> parse_int(std::string_view text) {
  if (text.empty()) return std::nullopt;
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

std::optional<int> parse_index(std::string_view text) {
  if (text.empty() || !std::all_of(text.begin(), text.end(),
                                   [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); }))
    return std::nullopt;
  return parse_int(text);
}

}  // namespace

std::optional<BlockId> BlockId::from_name(std::string_view text) {
  if (text == "A0") return a0();
  if (text.starts_with("LAG")) {
    auto l = parse_index(text.substr(3));
    if (l && *l >= 1) return lag(*l);
    return std::nullopt;
  }
  if (text.starts_with("IR")) {
    auto h = parse_index(text.substr(2));
    if (h) return ir(*h);
  }
  return std::nullopt;
}

int RestrictionSpec::zero_count() const {
  int total = 0;
  for (const auto& b : blocks) total += static_cast<int>(std::count(b.cells.begin(), b.cells.end(), Cell::Zero));
  return total;
}

void validate(const RestrictionSpec& spec) {
  const int n = spec.dims.n;
  if (n < 1 || spec.dims.p < 0) throw Error(Errc::InvalidArgument, "invalid model dimensions");
  if (spec.blocks.empty()) throw Error(Errc::InvalidArgument, "restriction spec has no blocks");
  for (std::size_t i = 0; i < spec.blocks.size(); ++i) {
    const auto& b = spec.blocks[i];
    if (b.id.kind == BlockId::Kind::Lag && (b.id.index < 1 || b.id.index > spec.dims.p))
      throw Error(Errc::UnknownBlock, "block " + b.id.name() + " exceeds lag order p = " +
                                          std::to_string(spec.dims.p));
    if (b.id.kind == BlockId::Kind::IR && b.id.index < 0)
      throw Error(Errc::UnknownBlock, "negative impulse-response horizon");
    if (b.cells.size() != static_cast<std::size_t>(n * n))
      throw Error(Errc::DimensionMismatch, "block " + b.id.name() + " is not " + std::to_string(n) +
                                               "x" + std::to_string(n));
    for (std::size_t j = 0; j < i; ++j)
      if (spec.blocks[j].id == b.id) throw Error(Errc::DuplicateBlock, "duplicate block " + b.id.name());
  }
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct Token {
  std::string_view text;
  int column;  // 1-based
};

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
  }
  return out;
}

class SpecParser {
 public:
  explicit SpecParser(std::string_view text) : text_(text) {}

  RestrictionSpec run() {
    std::size_t pos = 0;
    while (pos <= text_.size()) {
      std::size_t end = text_.find('\n', pos);
      if (end == std::string_view::npos) end = text_.size();
      ++line_no_;
      handle_line(text_.substr(pos, end - pos));
      pos = end + 1;
    }
    finish_block(line_no_);
    if (!n_ || !p_) fail(Errc::SyntaxError, "missing 'n = <int>' or 'p = <int>' header", 0, 0);
    if (spec_.blocks.empty()) fail(Errc::SyntaxError, "no 'block' sections", 0, 0);
    return spec_;
  }

 private:
  [[noreturn]] void fail(Errc code, const std::string& what, int line, int column) {
    throw ParseError(code, what, line, column);
  }

  void handle_line(std::string_view raw) {
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    auto tokens = tokenize(raw);
    if (tokens.empty()) return;

    if (tokens[0].text == "block") {
      start_block(tokens);
    } else if (raw.find('=') != std::string_view::npos) {
      assignment(raw, tokens);
    } else {
      pattern_row(tokens);
    }
  }

  void assignment(std::string_view raw, const std::vector<Token>& tokens) {
    const auto eq = raw.find('=');
    const auto key_tokens = tokenize(raw.substr(0, eq));
    const auto value_tokens = tokenize(raw.substr(eq + 1));
    if (key_tokens.size() != 1 || value_tokens.size() != 1)
      fail(Errc::SyntaxError, "expected '<name> = <int>'", line_no_, tokens[0].column);
    if (current_)
      fail(Errc::SyntaxError, "assignment inside a block", line_no_, tokens[0].column);
    if (!spec_.blocks.empty())
      fail(Errc::SyntaxError, "assignments must precede all blocks", line_no_, tokens[0].column);

    const int value_col = static_cast<int>(eq) + 1 + value_tokens[0].column;
    auto value = parse_int(value_tokens[0].text);
    if (!value) fail(Errc::SyntaxError, "expected an integer", line_no_, value_col);

    const auto key = key_tokens[0].text;
    std::optional<int>* slot = nullptr;
    if (key == "n") slot = &n_;
    else if (key == "p") slot = &p_;
    else fail(Errc::SyntaxError, "unknown setting '" + std::string(key) + "'", line_no_, key_tokens[0].column);

    if (slot->has_value())
      fail(Errc::SyntaxError, "setting '" + std::string(key) + "' given twice", line_no_, key_tokens[0].column);
    if (key == "n" && *value < 1) fail(Errc::SyntaxError, "n must be positive", line_no_, value_col);
    if (key == "p" && *value < 0) fail(Errc::SyntaxError, "p must be nonnegative", line_no_, value_col);
    *slot = *value;
  }

  void start_block(const std::vector<Token>& tokens) {
    finish_block(line_no_);
    if (!n_ || !p_) fail(Errc::SyntaxError, "'n' and 'p' must be set before the first block", line_no_, tokens[0].column);
    if (spec_.blocks.empty()) spec_.dims = ModelDims(*n_, *p_);
    if (tokens.size() != 2) fail(Errc::SyntaxError, "expected 'block <name>'", line_no_, tokens[0].column);

    const auto& name = tokens[1];
    auto id = BlockId::from_name(name.text);
    if (!id)
      fail(Errc::UnknownBlock, "unknown block '" + std::string(name.text) + "' (expected A0, LAG1..LAG" +
                                   std::to_string(*p_) + ", IR0, IR1, ...)",
           line_no_, name.column);
    if (id->kind == BlockId::Kind::Lag && id->index > *p_)
      fail(Errc::UnknownBlock, "block " + id->name() + " exceeds lag order p = " + std::to_string(*p_),
           line_no_, name.column);
    for (const auto& b : spec_.blocks)
      if (b.id == *id) fail(Errc::DuplicateBlock, "duplicate block " + id->name(), line_no_, name.column);

    current_ = RestrictionBlock{*id, {}};
    rows_read_ = 0;
    block_line_ = line_no_;
  }

  void pattern_row(const std::vector<Token>& tokens) {
    if (!current_) fail(Errc::SyntaxError, "pattern row outside a block", line_no_, tokens[0].column);
    const int n = *n_;
    if (rows_read_ == n)
      fail(Errc::DimensionMismatch, "block " + current_->id.name() + " has more than " + std::to_string(n) + " rows",
           line_no_, tokens[0].column);
    if (static_cast<int>(tokens.size()) != n)
      fail(Errc::DimensionMismatch,
           "expected " + std::to_string(n) + " cells, found " + std::to_string(tokens.size()), line_no_,
           tokens[0].column);
    for (const auto& t : tokens) {
      if (t.text == "0") current_->cells.push_back(Cell::Zero);
      else if (t.text == "x" || t.text == "X") current_->cells.push_back(Cell::Free);
      else fail(Errc::SyntaxError, "invalid cell '" + std::string(t.text) + "' (expected 0 or x)", line_no_, t.column);
    }
    ++rows_read_;
  }

  void finish_block(int line) {
    if (!current_) return;
    if (rows_read_ != *n_)
      fail(Errc::DimensionMismatch,
           "block " + current_->id.name() + " has " + std::to_string(rows_read_) + " rows, expected " +
               std::to_string(*n_),
           rows_read_ == 0 ? block_line_ : line, 0);
    spec_.blocks.push_back(std::move(*current_));
    current_.reset();
  }

  std::string_view text_;
  int line_no_ = 0;
  std::optional<int> n_;
  std::optional<int> p_;
  std::optional<RestrictionBlock> current_;
  int rows_read_ = 0;
  int block_line_ = 0;
  RestrictionSpec spec_;
};

}  // namespace

RestrictionSpec parse_spec(std::string_view text) { return SpecParser(text).run(); }

RestrictionSpec load_spec_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::InvalidArgument, "cannot open spec file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_spec(buf.str());
}

std::string format_spec(const RestrictionSpec& spec) {
  const int n = spec.dims.n;
  std::ostringstream out;
  out << "n = " << n << "\np = " << spec.dims.p << "\n";
  for (const auto& b : spec.blocks) {
    out << "block " << b.id.name() << "\n";
    for (int i = 0; i < n; ++i) {
      out << " ";
      for (int j = 0; j < n; ++j) out << ' ' << (b.is_zero(i, j, n) ? '0' : 'x');
      out << "\n";
    }
  }
  return out.str();
}

std::string describe(const CellRef& cell, const RestrictionSpec& spec) {
  return spec.blocks.at(static_cast<std::size_t>(cell.block)).id.name() + "(" + std::to_string(cell.row + 1) +
         "," + std::to_string(cell.col + 1) + ")";
}

// ---------------------------------------------------------------------------
// Compilation

CellRef CompiledRestrictions::cell(int j, int i) const {
  const int row = selected_rows.at(static_cast<std::size_t>(j)).at(static_cast<std::size_t>(i));
  return {row / n, row % n, permutation.at(static_cast<std::size_t>(j))};
}

namespace {

// Stable ordering of columns by nonincreasing q.
std::vector<int> ordering(const std::vector<int>& q) {
  std::vector<int> perm(q.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) { return q[a] > q[b]; });
  return perm;
}

Matrix nonzero_rows(const Matrix& q) {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < q.rows(); ++i)
    if ((q.row(i).array() != 0.0).any()) keep.push_back(i);
  Matrix out(static_cast<Eigen::Index>(keep.size()), q.cols());
  for (std::size_t r = 0; r < keep.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = q.row(keep[r]);
  return out;
}

}  // namespace

CompiledRestrictions compile(const RestrictionSpec& spec) {
  validate(spec);
  const int n = spec.dims.n;
  const int k = spec.k();

  std::vector<std::vector<int>> rows_by_column(static_cast<std::size_t>(n));
  for (int b = 0; b < static_cast<int>(spec.blocks.size()); ++b)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (spec.blocks[static_cast<std::size_t>(b)].is_zero(i, j, n))
          rows_by_column[static_cast<std::size_t>(j)].push_back(b * n + i);

  std::vector<int> q_orig(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) q_orig[static_cast<std::size_t>(j)] = static_cast<int>(rows_by_column[static_cast<std::size_t>(j)].size());

  CompiledRestrictions c;
  c.n = n;
  c.k = k;
  c.permutation = ordering(q_orig);
  for (int original : c.permutation) {
    const auto& rows = rows_by_column[static_cast<std::size_t>(original)];
    Matrix qj = Matrix::Zero(k, k);
    Matrix bar = Matrix::Zero(static_cast<Eigen::Index>(rows.size()), k);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      qj(static_cast<Eigen::Index>(r), rows[r]) = 1.0;
      bar(static_cast<Eigen::Index>(r), rows[r]) = 1.0;
    }
    c.q_matrices.push_back(std::move(qj));
    c.q_bar.push_back(std::move(bar));
    c.q.push_back(static_cast<int>(rows.size()));
    c.selected_rows.push_back(rows);
    c.total += static_cast<int>(rows.size());
  }
  return c;
}

CompiledRestrictions compile_linear(const RestrictionSpec& spec, const std::vector<Matrix>& q_by_column) {
  validate(spec);
  const int n = spec.dims.n;
  const int k = spec.k();
  if (static_cast<int>(q_by_column.size()) != n)
    throw Error(Errc::DimensionMismatch, "compile_linear: need one restriction matrix per column");

  std::vector<int> q_orig;
  for (const auto& qj : q_by_column) {
    if (qj.rows() != k || qj.cols() != k)
      throw Error(Errc::DimensionMismatch, "compile_linear: restriction matrices must be k x k");
    if (!qj.allFinite()) throw Error(Errc::InvalidArgument, "compile_linear: non-finite entry");
    q_orig.push_back(numerical_rank(qj));
  }

  CompiledRestrictions c;
  c.n = n;
  c.k = k;
  c.permutation = ordering(q_orig);
  for (int original : c.permutation) {
    const auto& qj = q_by_column[static_cast<std::size_t>(original)];
    c.q_matrices.push_back(qj);
    c.q_bar.push_back(nonzero_rows(qj));
    c.q.push_back(q_orig[static_cast<std::size_t>(original)]);
    c.total += c.q.back();
  }
  return c;
}

// ---------------------------------------------------------------------------
// f(A0, A+)

Matrix assemble_f(const StructuralParams& s, const RestrictionSpec& spec) {
  if (s.dims() != spec.dims) throw Error(Errc::DimensionMismatch, "assemble_f: model dimensions differ from spec");
  if (!is_invertible(s.a0())) throw Error(Errc::SingularA0, "assemble_f: A0 is singular");
  const int n = spec.dims.n;
  Matrix f(spec.k(), n);
  for (std::size_t b = 0; b < spec.blocks.size(); ++b) {
    const auto& id = spec.blocks[b].id;
    Matrix value;
    switch (id.kind) {
      case BlockId::Kind::A0: value = s.a0(); break;
      case BlockId::Kind::Lag: value = s.lag(id.index); break;
      case BlockId::Kind::IR: value = ir_horizon(s, id.index); break;
    }
    f.middleRows(static_cast<Eigen::Index>(b) * n, n) = value;
  }
  return f;
}

double restriction_residual(const StructuralParams& s, const CompiledRestrictions& c, const RestrictionSpec& spec) {
  const Matrix f = assemble_f(s, spec);
  double worst = 0.0;
  for (int j = 0; j < c.n; ++j) {
    const auto& bar = c.q_bar[static_cast<std::size_t>(j)];
    if (bar.rows() == 0) continue;
    const Vector r = bar * f.col(c.permutation[static_cast<std::size_t>(j)]);
    worst = std::max(worst, r.cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace svarid
