#pragma once

// Dense linear-algebra kernels for the small matrices that appear in
// identification checks (n up to a few dozen).

#include <cstdint>
#include <optional>

#include <Eigen/Dense>

namespace svarid {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// How singular values are compared against zero.
///
/// Relative: threshold = factor * sigma_max, with factor defaulting to
/// max(rows, cols) * machine epsilon.  Absolute: threshold = value.
struct RankTolerance {
  enum class Policy { Relative, Absolute };

  Policy policy = Policy::Relative;
  std::optional<double> value;

  static RankTolerance relative(double factor) { return {Policy::Relative, factor}; }
  static RankTolerance absolute(double threshold) { return {Policy::Absolute, threshold}; }

  /// Threshold for a rows x cols matrix whose largest singular value is sigma_max.
  double resolve(Eigen::Index rows, Eigen::Index cols, double sigma_max) const;
};

bool all_finite(const Matrix& m);

/// Lower Cholesky factor L of a symmetric positive definite matrix, L L' = sigma.
/// Throws Error(NotSymmetric) or Error(NotPositiveDefinite).
Matrix cholesky_lower(const Matrix& sigma);

/// Singular values in nonincreasing order (empty for an empty matrix).
Vector singular_values(const Matrix& m);

int numerical_rank(const Matrix& m, const RankTolerance& tol = {});

enum class NullStatus { Unique, RankDeficient, NoNullVector };

struct NullVectorResult {
  NullStatus status = NullStatus::NoNullVector;
  Vector vector;           // unit norm; empty when status is NoNullVector
  int rank = 0;
  int null_dimension = 0;  // n - rank
  Matrix basis;            // n x null_dimension orthonormal basis of the null space
  Vector singular;         // singular values of m, padded with zeros to length n
};

/// Unit vector p with m p = 0, computed from a full SVD so that a rank
/// deficiency (null space of dimension > 1) is reported rather than resolved.
NullVectorResult unit_null_vector(const Matrix& m, const RankTolerance& tol = {});

/// Haar-style orthogonal matrix from the QR factorization of a Gaussian
/// matrix, with the diagonal of R made positive.  Deterministic in seed.
Matrix random_orthogonal(int n, std::uint64_t seed);

/// Largest absolute entry.
double max_abs(const Matrix& m);

}  // namespace svarid
