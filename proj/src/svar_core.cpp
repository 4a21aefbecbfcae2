#include "svarid/svar_core.hpp"

#include <string>

#include "svarid/error.hpp"

namespace svarid {

namespace {

void require_shape(const Matrix& m, int rows, int cols, const char* what) {
  if (m.rows() != rows || m.cols() != cols)
    throw Error(Errc::DimensionMismatch,
                std::string(what) + ": expected " + std::to_string(rows) + "x" +
                    std::to_string(cols) + ", got " + std::to_string(m.rows()) + "x" +
                    std::to_string(m.cols()));
  if (!m.allFinite()) throw Error(Errc::InvalidArgument, std::string(what) + ": non-finite entry");
}

Matrix checked_inverse(const Matrix& a0) {
  if (!is_invertible(a0)) throw Error(Errc::SingularA0, "A0 is singular");
  return a0.fullPivLu().inverse();
}

}  // namespace

ModelDims::ModelDims(int n_vars, int lags) : n(n_vars), p(lags) {
  if (n < 1) throw Error(Errc::InvalidArgument, "n must be positive");
  if (p < 0) throw Error(Errc::InvalidArgument, "p must be nonnegative");
}

StructuralParams::StructuralParams(ModelDims dims, Matrix a0, Matrix aplus)
    : dims_(dims), a0_(std::move(a0)), aplus_(std::move(aplus)) {
  require_shape(a0_, dims_.n, dims_.n, "A0");
  require_shape(aplus_, dims_.m(), dims_.n, "A+");
}

Matrix StructuralParams::lag(int l) const {
  if (l < 1 || l > dims_.p) throw Error(Errc::InvalidArgument, "lag index out of range");
  return aplus_.middleRows((l - 1) * dims_.n, dims_.n);
}

StructuralParams StructuralParams::rotated(const Matrix& p) const {
  require_shape(p, dims_.n, dims_.n, "P");
  return StructuralParams(dims_, a0_ * p, aplus_ * p);
}

ReducedFormParams::ReducedFormParams(ModelDims dims, Matrix b, Matrix sigma)
    : dims_(dims), b_(std::move(b)), sigma_(std::move(sigma)) {
  require_shape(b_, dims_.m(), dims_.n, "B");
  require_shape(sigma_, dims_.n, dims_.n, "Sigma");
  cholesky_lower(sigma_);  // rejects non-symmetric or indefinite Sigma
}

bool is_invertible(const Matrix& a0) {
  return a0.rows() == a0.cols() && numerical_rank(a0) == a0.rows();
}

ReducedFormParams to_reduced_form(const StructuralParams& s) {
  const Matrix a0_inv = checked_inverse(s.a0());
  Matrix sigma = a0_inv.transpose() * a0_inv;  // (A0 A0')^{-1}
  sigma = 0.5 * (sigma + sigma.transpose()).eval();
  return ReducedFormParams(s.dims(), s.aplus() * a0_inv, std::move(sigma));
}

StructuralParams baseline_structural(const ReducedFormParams& r) {
  const Matrix l = cholesky_lower(r.sigma());
  const auto n = l.rows();
  const Matrix l_inv =
      l.triangularView<Eigen::Lower>().solve(Matrix::Identity(n, n));
  Matrix a0 = l_inv.transpose();
  return StructuralParams(r.dims(), a0, r.b() * a0);
}

Matrix contemporaneous_ir(const Matrix& a0) { return checked_inverse(a0).transpose(); }

Matrix companion_matrix(const Matrix& b, const ModelDims& dims) {
  const int n = dims.n;
  const int np = n * dims.p;
  Matrix f = Matrix::Zero(np, np);
  for (int l = 0; l < dims.p; ++l) {
    f.block(l * n, 0, n, n) = b.middleRows(l * n, n);
    if (l + 1 < dims.p) f.block(l * n, (l + 1) * n, n, n) = Matrix::Identity(n, n);
  }
  return f;
}

Matrix ir_horizon(const StructuralParams& s, int h) {
  if (h < 0) throw Error(Errc::InvalidArgument, "ir_horizon: negative horizon");
  const Matrix a0_inv = checked_inverse(s.a0());
  const Matrix ir0 = a0_inv.transpose();
  if (h == 0) return ir0;

  const int n = s.dims().n;
  if (s.dims().p == 0) return Matrix::Zero(n, n);

  // y_{t+h}' responds to e_t' through A0^{-1} C_h, with C_h the leading
  // n x n block of F^h.
  const Matrix b = s.aplus() * a0_inv;
  const Matrix f = companion_matrix(b, s.dims());
  Matrix power = f;
  for (int i = 1; i < h; ++i) power = (power * f).eval();
  return power.topLeftCorner(n, n).transpose() * ir0;
}

}  // namespace svarid
