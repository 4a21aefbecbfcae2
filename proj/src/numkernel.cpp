#include "svarid/numkernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "svarid/error.hpp"

namespace svarid {

double RankTolerance::resolve(Eigen::Index rows, Eigen::Index cols, double sigma_max) const {
  if (policy == Policy::Absolute) return value.value_or(0.0);
  const double factor = value.value_or(static_cast<double>(std::max(rows, cols)) *
                                       std::numeric_limits<double>::epsilon());
  return factor * sigma_max;
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

Matrix cholesky_lower(const Matrix& sigma) {
  if (sigma.rows() != sigma.cols() || sigma.rows() == 0)
    throw Error(Errc::InvalidArgument, "cholesky_lower: matrix must be square and non-empty");
  if (!sigma.allFinite()) throw Error(Errc::InvalidArgument, "cholesky_lower: non-finite entry");

  const Eigen::Index n = sigma.rows();
  const double scale = std::max(max_abs(sigma), std::numeric_limits<double>::min());
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < i; ++j)
      if (std::abs(sigma(i, j) - sigma(j, i)) > 1e-12 * scale)
        throw Error(Errc::NotSymmetric, "cholesky_lower: matrix is not symmetric");

  Matrix l = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double pivot = sigma(j, j);
    for (Eigen::Index k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
    if (!(pivot > 0.0))
      throw Error(Errc::NotPositiveDefinite,
                  "cholesky_lower: non-positive pivot at index " + std::to_string(j + 1));
    l(j, j) = std::sqrt(pivot);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double s = sigma(i, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

Vector singular_values(const Matrix& m) {
  if (m.size() == 0) return Vector();
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues();
}

namespace {

int count_above(const Vector& sv, double threshold) {
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > threshold) ++r;
  return r;
}

}  // namespace

int numerical_rank(const Matrix& m, const RankTolerance& tol) {
  if (m.size() == 0) return 0;
  const Vector sv = singular_values(m);
  const double sigma_max = sv.size() > 0 ? sv(0) : 0.0;
  if (sigma_max == 0.0) return 0;
  return count_above(sv, tol.resolve(m.rows(), m.cols(), sigma_max));
}

NullVectorResult unit_null_vector(const Matrix& m, const RankTolerance& tol) {
  const auto n = m.cols();
  NullVectorResult out;
  out.singular = Vector::Zero(n);
  if (n == 0) return out;

  Matrix v;
  if (m.rows() == 0) {
    v = Matrix::Identity(n, n);
    out.rank = 0;
  } else {
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
    const Vector& sv = svd.singularValues();
    out.singular.head(sv.size()) = sv;
    const double sigma_max = sv(0);
    out.rank = sigma_max == 0.0 ? 0 : count_above(sv, tol.resolve(m.rows(), n, sigma_max));
    v = svd.matrixV();
  }

  out.null_dimension = static_cast<int>(n) - out.rank;
  if (out.null_dimension == 0) {
    out.status = NullStatus::NoNullVector;
    out.basis = Matrix(n, 0);
    return out;
  }
  out.basis = v.rightCols(out.null_dimension);
  out.vector = out.basis.col(out.null_dimension - 1);
  out.vector.normalize();
  out.status = out.null_dimension == 1 ? NullStatus::Unique : NullStatus::RankDeficient;
  return out;
}

Matrix random_orthogonal(int n, std::uint64_t seed) {
  if (n < 1) throw Error(Errc::InvalidArgument, "random_orthogonal: n must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = normal(rng);

  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

}  // namespace svarid
