#include <gtest/gtest.h>

#include <random>

#include "support/test_support.hpp"
#include "svarid/error.hpp"
#include "svarid/restrictions.hpp"

using namespace svarid;
using svarid::testing::random_lower;
using svarid::testing::random_matrix;
using svarid::testing::random_structural;

namespace {

const char* kCounterexample = R"(n = 3
p = 1
block A0
  x x x
  0 x x
  0 x x
block IR0   # comment after a header
  x 0 x
  x x x
  x x x
)";

std::vector<Cell> cells(std::initializer_list<int> zeros_mask) {
  std::vector<Cell> out;
  for (int z : zeros_mask) out.push_back(z ? Cell::Zero : Cell::Free);
  return out;
}

template <typename Fn>
Errc error_code(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an exception";
  return Errc::InvalidArgument;
}

RestrictionSpec recursive_spec(int n) {
  RestrictionSpec spec;
  spec.dims = ModelDims(n, 1);
  RestrictionBlock b{BlockId::a0(), std::vector<Cell>(static_cast<std::size_t>(n * n), Cell::Free)};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) b.cells[static_cast<std::size_t>(i * n + j)] = Cell::Zero;
  spec.blocks.push_back(b);
  return spec;
}

}  // namespace

TEST(BlockId, Names) {
  EXPECT_EQ(BlockId::a0().name(), "A0");
  EXPECT_EQ(BlockId::lag(3).name(), "LAG3");
  EXPECT_EQ(BlockId::ir(12).name(), "IR12");
  EXPECT_EQ(BlockId::from_name("IR12"), BlockId::ir(12));
  EXPECT_EQ(BlockId::from_name("LAG1"), BlockId::lag(1));
  EXPECT_FALSE(BlockId::from_name("LAG0"));
  EXPECT_FALSE(BlockId::from_name("IR"));
  EXPECT_FALSE(BlockId::from_name("IR-1"));
  EXPECT_FALSE(BlockId::from_name("C"));
  EXPECT_FALSE(BlockId::from_name("a0"));
}

TEST(ParseSpec, Counterexample) {
  const auto spec = parse_spec(kCounterexample);
  EXPECT_EQ(spec.dims, ModelDims(3, 1));
  ASSERT_EQ(spec.blocks.size(), 2u);
  EXPECT_EQ(spec.blocks[0].id, BlockId::a0());
  EXPECT_EQ(spec.blocks[0].cells, cells({0, 0, 0, 1, 0, 0, 1, 0, 0}));
  EXPECT_EQ(spec.blocks[1].id, BlockId::ir(0));
  EXPECT_EQ(spec.blocks[1].cells, cells({0, 1, 0, 0, 0, 0, 0, 0, 0}));
  EXPECT_EQ(spec.zero_count(), 3);
}

TEST(ParseSpec, AllFree) {
  const auto spec = parse_spec("n = 2\np = 0\nblock A0\n x x\n X x\n");
  EXPECT_EQ(spec.zero_count(), 0);
  EXPECT_EQ(spec.k(), 2);
}

TEST(ParseSpec, ShortRowIsDimensionMismatch) {
  try {
    parse_spec("n = 3\np = 1\nblock A0\n  x x x\n  0 x\n  0 x x\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.code(), Errc::DimensionMismatch);
    EXPECT_EQ(e.line(), 5);
  }
}

TEST(ParseSpec, MissingRowsIsDimensionMismatch) {
  EXPECT_EQ(error_code([] { parse_spec("n = 3\np = 1\nblock A0\n  x x x\nblock IR0\n x x x\n x x x\n x x x\n"); }),
            Errc::DimensionMismatch);
  EXPECT_EQ(error_code([] { parse_spec("n = 2\np = 1\nblock A0\n  x x\n  x x\n  x x\n"); }), Errc::DimensionMismatch);
}

TEST(ParseSpec, BadCellReportsLineAndColumn) {
  try {
    parse_spec("n = 2\np = 0\nblock A0\n  x 1\n  x x\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.code(), Errc::SyntaxError);
    EXPECT_EQ(e.line(), 4);
    EXPECT_EQ(e.column(), 5);
    EXPECT_NE(std::string(e.what()).find("line 4, column 5"), std::string::npos);
  }
}

TEST(ParseSpec, UnknownBlocks) {
  EXPECT_EQ(error_code([] { parse_spec("n = 2\np = 1\nblock LAG2\n x x\n x x\n"); }), Errc::UnknownBlock);
  EXPECT_EQ(error_code([] { parse_spec("n = 2\np = 1\nblock FOO\n x x\n x x\n"); }), Errc::UnknownBlock);
  // The constant row cannot be restricted.
  EXPECT_EQ(error_code([] { parse_spec("n = 2\np = 1\nblock C\n x x\n x x\n"); }), Errc::UnknownBlock);
}

TEST(ParseSpec, DuplicateBlock) {
  EXPECT_EQ(error_code([] { parse_spec("n = 1\np = 0\nblock A0\n x\nblock A0\n 0\n"); }), Errc::DuplicateBlock);
}

TEST(ParseSpec, HeaderErrors) {
  EXPECT_EQ(error_code([] { parse_spec("p = 1\nblock A0\n x\n"); }), Errc::SyntaxError);
  EXPECT_EQ(error_code([] { parse_spec("n = 2\np = 1\n"); }), Errc::SyntaxError);
  EXPECT_EQ(error_code([] { parse_spec("n = two\np = 1\n"); }), Errc::SyntaxError);
  EXPECT_EQ(error_code([] { parse_spec("n = 2\nn = 2\np = 1\n"); }), Errc::SyntaxError);
  EXPECT_EQ(error_code([] { parse_spec("n = 0\np = 1\n"); }), Errc::SyntaxError);
  EXPECT_EQ(error_code([] { parse_spec("n = 1\np = 0\nx\n"); }), Errc::SyntaxError);
  EXPECT_EQ(error_code([] { parse_spec("n = 1\np = 0\nblock\n x\n"); }), Errc::SyntaxError);
  EXPECT_EQ(error_code([] { parse_spec("n = 1\np = 0\nblock A0\n x\nq = 3\n"); }), Errc::SyntaxError);
}

TEST(ParseSpec, FormatRoundTrip) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const auto spec = svarid::testing::random_count_passing_spec(2 + trial % 4, trial % 3, rng);
    EXPECT_EQ(parse_spec(format_spec(spec)), spec);
  }
}

TEST(Compile, CounterexampleSelectionMatrices) {
  const auto spec = parse_spec(kCounterexample);
  const auto c = compile(spec);
  EXPECT_EQ(c.k, 6);
  EXPECT_EQ(c.q, (std::vector<int>{2, 1, 0}));
  EXPECT_EQ(c.total, 3);
  EXPECT_EQ(c.permutation, (std::vector<int>{0, 1, 2}));

  Matrix q1 = Matrix::Zero(6, 6);
  q1(0, 1) = 1;
  q1(1, 2) = 1;
  Matrix q2 = Matrix::Zero(6, 6);
  q2(0, 3) = 1;
  EXPECT_EQ(c.q_matrices[0], q1);
  EXPECT_EQ(c.q_matrices[1], q2);
  EXPECT_EQ(c.q_matrices[2], Matrix::Zero(6, 6));
  EXPECT_EQ(c.q_bar[0], q1.topRows(2));
  EXPECT_EQ(c.q_bar[2].rows(), 0);
  EXPECT_EQ(describe(c.cell(1, 0), spec), "IR0(1,2)");
  EXPECT_EQ(describe(c.cell(0, 1), spec), "A0(3,1)");
}

TEST(Compile, NoZeros) {
  const auto c = compile(parse_spec("n = 3\np = 0\nblock A0\n x x x\n x x x\n x x x\n"));
  EXPECT_EQ(c.q, (std::vector<int>{0, 0, 0}));
  EXPECT_EQ(c.total, 0);
}

TEST(Compile, RecursivePatternCounts) {
  for (int n = 1; n <= 7; ++n) {
    const auto c = compile(recursive_spec(n));
    std::vector<int> expected;
    for (int j = 1; j <= n; ++j) expected.push_back(n - j);
    EXPECT_EQ(c.q, expected);
  }
}

TEST(Compile, StablePermutationToNonincreasing) {
  // Column zero counts 0, 2, 1, 2 -> order 2, 4, 3, 1 (1-based), ties stable.
  const auto spec = parse_spec(R"(n = 4
p = 0
block A0
  x 0 x 0
  x 0 0 0
  x x x x
  x x x x
)");
  const auto c = compile(spec);
  EXPECT_EQ(c.permutation, (std::vector<int>{1, 3, 2, 0}));
  EXPECT_EQ(c.q, (std::vector<int>{2, 2, 1, 0}));
  EXPECT_EQ(c.cell(2, 0).col, 2);
}

TEST(Compile, SelectionInvariants) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const auto spec = svarid::testing::random_count_passing_spec(2 + trial % 4, trial % 3, rng);
    const auto c = compile(spec);
    EXPECT_EQ(c.total, spec.zero_count());
    EXPECT_TRUE(std::is_sorted(c.q.rbegin(), c.q.rend()));
    for (int j = 0; j < c.n; ++j) {
      const auto& qj = c.q_matrices[static_cast<std::size_t>(j)];
      // Each nonzero row is a distinct coordinate selector.
      int nonzero_rows = 0;
      std::vector<int> seen;
      for (int r = 0; r < qj.rows(); ++r) {
        if ((qj.row(r).array() == 0.0).all()) continue;
        ++nonzero_rows;
        EXPECT_EQ(qj.row(r).sum(), 1.0);
        EXPECT_EQ(qj.row(r).cwiseAbs().maxCoeff(), 1.0);
        int col = 0;
        qj.row(r).maxCoeff(&col);
        EXPECT_EQ(std::count(seen.begin(), seen.end(), col), 0);
        seen.push_back(col);
      }
      EXPECT_EQ(nonzero_rows, c.q[static_cast<std::size_t>(j)]);
      EXPECT_EQ(numerical_rank(qj), c.q[static_cast<std::size_t>(j)]);
    }
    const auto again = compile(spec);
    EXPECT_EQ(again.q, c.q);
    EXPECT_EQ(again.permutation, c.permutation);
    EXPECT_EQ(again.selected_rows, c.selected_rows);
  }
}

TEST(CompileLinear, GeneralRestrictionMatrices) {
  const auto spec = parse_spec("n = 2\np = 0\nblock A0\n x x\n x x\n");
  // Column 1: a11 + a21 = 0 expressed twice (rank 1); column 2 free.
  Matrix q1(2, 2);
  q1 << 1, 1, 2, 2;
  const auto c = compile_linear(spec, {q1, Matrix::Zero(2, 2)});
  EXPECT_EQ(c.q, (std::vector<int>{1, 0}));
  EXPECT_FALSE(c.is_selection());
  EXPECT_EQ(c.q_bar[0].rows(), 2);
  EXPECT_THROW(compile_linear(spec, {q1}), Error);
}

TEST(AssembleF, IdentityStack) {
  const auto spec = parse_spec(kCounterexample);
  const StructuralParams s(spec.dims, Matrix::Identity(3, 3), Matrix::Zero(4, 3));
  Matrix expected(6, 3);
  expected << Matrix::Identity(3, 3), Matrix::Identity(3, 3);
  EXPECT_EQ(assemble_f(s, spec), expected);
}

TEST(AssembleF, RecursivePointInCholeskyEntries) {
  std::mt19937_64 rng(41);
  const Matrix l = random_lower(3, rng);
  const double l11 = l(0, 0), l21 = l(1, 0), l22 = l(1, 1), l31 = l(2, 0), l32 = l(2, 1), l33 = l(2, 2);
  const auto spec = parse_spec(kCounterexample);
  const auto s = baseline_structural(ReducedFormParams(spec.dims, Matrix::Zero(4, 3), l * l.transpose()));
  Matrix expected(6, 3);
  expected << 1 / l11, -l21 / (l11 * l22), (l21 * l32 - l22 * l31) / (l11 * l22 * l33),
      0, 1 / l22, -l32 / (l22 * l33),
      0, 0, 1 / l33,
      l11, 0, 0,
      l21, l22, 0,
      l31, l32, l33;
  EXPECT_LE(max_abs(assemble_f(s, spec) - expected), 1e-10 * max_abs(expected));
}

TEST(AssembleF, AdmissibleForEveryBlockKind) {
  std::mt19937_64 rng(43);
  const auto spec = parse_spec(R"(n = 3
p = 2
block LAG2
  x x x
  x x x
  x x x
block IR3
  x x x
  x x x
  x x x
block A0
  x x x
  x x x
  x x x
block IR0
  x x x
  x x x
  x x x
block LAG1
  x x x
  x x x
  x x x
)");
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = random_structural(spec.dims, rng);
    const Matrix p = random_orthogonal(3, rng());
    const Matrix f = assemble_f(s, spec);
    EXPECT_LE(max_abs(assemble_f(s.rotated(p), spec) - f * p), 1e-9 * (1.0 + max_abs(f)));
  }
}

TEST(AssembleF, SingularA0) {
  const auto spec = parse_spec(kCounterexample);
  const StructuralParams s(spec.dims, Matrix::Zero(3, 3), Matrix::Zero(4, 3));
  try {
    assemble_f(s, spec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::SingularA0);
  }
}

TEST(RestrictionResidual, RecursiveIdentityIsZero) {
  const auto spec = recursive_spec(4);
  const StructuralParams s(spec.dims, Matrix::Identity(4, 4), Matrix::Zero(5, 4));
  EXPECT_EQ(restriction_residual(s, compile(spec), spec), 0.0);
}

TEST(RestrictionResidual, CounterexampleAtRecursivePointAndRotations) {
  std::mt19937_64 rng(47);
  const auto spec = parse_spec(kCounterexample);
  const auto c = compile(spec);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix l = random_lower(3, rng);
    const auto base =
        baseline_structural(ReducedFormParams(spec.dims, random_matrix(4, 3, rng), l * l.transpose()));
    // The recursive point already satisfies all three zeros.
    EXPECT_LE(restriction_residual(base, c, spec), 1e-15 * (1.0 + max_abs(assemble_f(base, spec))));

    const auto moved = base.rotated(random_orthogonal(3, rng()));
    const Matrix f = assemble_f(moved, spec);
    const double expected = std::max({std::abs(f(1, 0)), std::abs(f(2, 0)), std::abs(f(3, 1))});
    EXPECT_EQ(restriction_residual(moved, c, spec), expected);
    EXPECT_GT(expected, 0.0);
  }
}
