#pragma once

// Exact-identification checks for zero restrictions on SVARs.
//
// The counting condition q_j = n - j is necessary but not sufficient: a
// restriction can be implied by the others, in which case the stacked
// constraint matrix
//
//   Qt_j = [ Q_j f(A0, A+) ; p_1' ; ... ; p_{j-1}' ]
//
// built at the recursive point of a reduced form loses rank and p_j is not
// pinned down.  The model is exactly identified iff the counting condition
// holds and rank(Qt_j) = n - 1 for every j at almost every reduced form, so
// checking a handful of random reduced-form draws decides the question.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "svarid/numkernel.hpp"
#include "svarid/restrictions.hpp"
#include "svarid/sampler.hpp"
#include "svarid/svar_core.hpp"

namespace svarid {

struct IdentifierOptions {
  /// Rank decisions on Qt_j and M_j.
  RankTolerance tolerance = RankTolerance::relative(1e-10);
};

struct CountCondition {
  std::vector<bool> per_column;  // processing order
  bool overall = false;
};

/// Column j (processing order, 1-based) passes iff q_j = n - j.
CountCondition count_condition(const CompiledRestrictions& c);

/// Qt_j for 1-based processing index j: the selected rows of f_val for
/// column j followed by the transposed prior vectors p_1 ... p_{j-1}.
Matrix q_tilde(int j, const CompiledRestrictions& c, const Matrix& f_val, std::span<const Vector> prior);

enum class ColumnStatus { Unique, Redundant, Infeasible };

std::string_view to_string(ColumnStatus status);

struct ColumnDiagnostic {
  int j = 0;       // processing order, 1-based
  int column = 0;  // original column, 1-based
  int qtilde_rows = 0;
  int rank = 0;
  int required_rank = 0;  // n - 1
  ColumnStatus status = ColumnStatus::Unique;
  int null_dimension = 0;
  Vector singular_values;  // of Qt_j, padded with zeros to length n
};

struct RotationResult {
  std::optional<Matrix> p;  // columns in original order; absent when aborted
  std::vector<ColumnDiagnostic> per_column;
  std::vector<int> sign_flips;  // -1 where the null vector was negated, processing order
  bool unique = false;
};

struct SignNormalized {
  Vector p;
  bool flipped = false;
};

/// Chooses the sign of p so that (A0 p)_index > 0.  When that entry is
/// numerically zero, the first entry of p that is not is made positive.
SignNormalized sign_normalize(const Vector& p, int index, const Matrix& a0);

/// Non-redundancy check at one reduced-form point.  Stops at the first
/// column whose Qt_j has rank below n - 1.  Throws
/// Error(PreconditionCountFailure) when the counting condition fails.
RotationResult nonredundancy_at(const ReducedFormParams& r, const CompiledRestrictions& c, const RestrictionSpec& spec,
                                const IdentifierOptions& opts = {});

enum class OnRedundancy { Abort, PickArbitrary };

/// Builds the orthogonal P mapping the recursive point of r into the
/// restricted set.  With PickArbitrary, rank-deficient columns take a
/// random unit vector from the null space of Qt_j (drawn from pick_seed)
/// and the result is flagged non-unique.  Throws Error(Infeasible) if some
/// Qt_j has no null vector.
RotationResult construct_rotation(const ReducedFormParams& r, const CompiledRestrictions& c,
                                  const RestrictionSpec& spec, OnRedundancy mode = OnRedundancy::Abort,
                                  std::uint64_t pick_seed = 0, const IdentifierOptions& opts = {});

struct CrossCheckResult {
  std::vector<int> ranks;  // rank of M_j, processing order
  int total_restrictions = 0;
  int total_required = 0;
  bool pass = false;
};

/// Builds M_j = [Q_j f ; I_j 0] at a point of the restricted set and tests
/// rank(M_j) = n for all j together with total = n(n-1)/2.  Throws
/// Error(NotInR) when the residual of s_restricted exceeds 1e-8.
CrossCheckResult rank_cross_check(const StructuralParams& s_restricted, const CompiledRestrictions& c,
                              const RestrictionSpec& spec, const IdentifierOptions& opts = {});

/// M_j(f) for 1-based processing index j; f is in original column order.
Matrix m_matrix(int j, const CompiledRestrictions& c, const Matrix& f);

enum class Verdict { ExactlyIdentified, NotIdentifiedCountFailure, NotIdentifiedRedundancy, InconclusiveDrawDisagreement };

std::string_view to_string(Verdict v);

struct CheckConfig {
  int draws = 5;
  std::uint64_t seed = 0;
  double diag_floor = 0.1;
  double scale = 1.0;
  IdentifierOptions identifier;
};

struct DrawOutcome {
  std::uint64_t index = 0;
  std::uint64_t seed = 0;  // stream seed of this draw
  RotationResult rotation;
  bool pass = false;
};

struct IdentificationReport {
  CompiledRestrictions compiled;
  CountCondition count;
  int total_restrictions = 0;
  int total_required = 0;
  std::vector<DrawOutcome> draws;
  Verdict verdict = Verdict::NotIdentifiedCountFailure;
  std::string note;  // explanation accompanying a count failure
};

/// Counting condition first; then the non-redundancy check at cfg.draws
/// independent reduced-form draws.  All pass: exactly identified.  All
/// fail: not identified.  Mixed: inconclusive, reported as such.
IdentificationReport check_exact_identification(const RestrictionSpec& spec, const CheckConfig& cfg = {});

/// A restriction whose row in Qt_j lies in the span of the other rows.
struct ImpliedRestriction {
  CellRef cell;
  std::vector<CellRef> implied_by;
};

struct RedundancyExplanation {
  int j = 0;       // failing column, processing order, 1-based
  int column = 0;  // original column, 1-based
  int rank = 0;
  int required_rank = 0;
  std::vector<ImpliedRestriction> implied;
};

/// Locates the first rank-deficient column at r and names the restrictions
/// there that are implied by the others.  Prior vectors p_l are attributed
/// to the restrictions of column l.  Empty when no column is deficient.
/// Requires selection-row restrictions.
std::optional<RedundancyExplanation> explain_redundancy(const ReducedFormParams& r, const CompiledRestrictions& c,
                                                        const RestrictionSpec& spec,
                                                        const IdentifierOptions& opts = {});

}  // namespace svarid
