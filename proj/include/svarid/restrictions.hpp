#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "svarid/numkernel.hpp"
#include "svarid/svar_core.hpp"

namespace svarid {

/// A transformation block of f(A0, A+): A0 itself, a lag block A_l, or the
/// impulse responses at horizon h.
struct BlockId {
  enum class Kind { A0, Lag, IR };

  Kind kind = Kind::A0;
  int index = 0;  // lag l for Lag, horizon h for IR, unused for A0

  static BlockId a0() { return {Kind::A0, 0}; }
  static BlockId lag(int l) { return {Kind::Lag, l}; }
  static BlockId ir(int h) { return {Kind::IR, h}; }

  /// "A0", "LAG2", "IR0", ...
  std::string name() const;

  /// Inverse of name(); nullopt for anything else.  Does not check l <= p.
  static std::optional<BlockId> from_name(std::string_view text);

  friend bool operator==(const BlockId&, const BlockId&) = default;
};

enum class Cell : unsigned char { Free, Zero };

/// One block's n x n zero pattern, stored row-major.
struct RestrictionBlock {
  BlockId id;
  std::vector<Cell> cells;

  bool is_zero(int row, int col, int n) const {
    return cells[static_cast<std::size_t>(row * n + col)] == Cell::Zero;
  }

  friend bool operator==(const RestrictionBlock&, const RestrictionBlock&) = default;
};

struct RestrictionSpec {
  ModelDims dims;
  std::vector<RestrictionBlock> blocks;

  /// Rows of f(A0, A+): n per block.
  int k() const { return dims.n * static_cast<int>(blocks.size()); }

  int zero_count() const;

  friend bool operator==(const RestrictionSpec&, const RestrictionSpec&) = default;
};

/// Validates block names against p, pattern sizes and duplicates.
void validate(const RestrictionSpec& spec);

RestrictionSpec parse_spec(std::string_view text);
RestrictionSpec load_spec_file(const std::filesystem::path& path);

/// Canonical text form accepted by parse_spec.
std::string format_spec(const RestrictionSpec& spec);

/// A restricted cell of f, located by block and 0-based (row, col) within it.
struct CellRef {
  int block = 0;  // index into RestrictionSpec::blocks
  int row = 0;
  int col = 0;

  friend bool operator==(const CellRef&, const CellRef&) = default;
};

/// "IR0(1,2)" with 1-based indices.
std::string describe(const CellRef& cell, const RestrictionSpec& spec);

/// Selection matrices Q_j for Q_j f(A0, A+) e_j = 0, held in processing
/// order: columns are stably sorted so that q is nonincreasing.
struct CompiledRestrictions {
  int n = 0;
  int k = 0;
  std::vector<Matrix> q_matrices;  // k x k, processing order
  std::vector<Matrix> q_bar;       // nonzero rows of each Q_j
  std::vector<int> q;              // rank of each Q_j, processing order
  std::vector<int> permutation;    // permutation[j] = original column of processed column j
  int total = 0;

  /// For selection-row restrictions: the f-row behind each row of q_bar[j].
  /// Empty for general linear restrictions.
  std::vector<std::vector<int>> selected_rows;

  bool is_selection() const { return !selected_rows.empty(); }

  /// The restricted cell behind row i of q_bar[j] (selection restrictions only).
  CellRef cell(int j, int i) const;
};

CompiledRestrictions compile(const RestrictionSpec& spec);

/// General linear restrictions: one k x k matrix per structural column,
/// in original column order.  q_j is the numerical rank of each matrix.
CompiledRestrictions compile_linear(const RestrictionSpec& spec, const std::vector<Matrix>& q_by_column);

/// f(A0, A+): the blocks of spec evaluated at s, stacked in declared order.
Matrix assemble_f(const StructuralParams& s, const RestrictionSpec& spec);

/// max_j |Q_j f e_j|_inf, reading each Q_j against its original column.
double restriction_residual(const StructuralParams& s, const CompiledRestrictions& c,
                            const RestrictionSpec& spec);

}  // namespace svarid
