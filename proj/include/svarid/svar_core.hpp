#pragma once

// Structural and reduced-form VAR parameter containers in the row-vector
// convention  y_t' A0 = x_t' A+ + e_t',  y_t' = x_t' B + u_t',
// with x_t' = (y_{t-1}', ..., y_{t-p}', 1).

#include "svarid/numkernel.hpp"

namespace svarid {

struct ModelDims {
  int n = 0;  // endogenous variables
  int p = 0;  // lag order

  ModelDims() = default;
  ModelDims(int n_vars, int lags);

  /// Rows of A+ and B: n*p lag coefficients plus the constant.
  int m() const { return n * p + 1; }

  friend bool operator==(const ModelDims&, const ModelDims&) = default;
};

/// (A0, A+).  A+ stacks A_1, ..., A_p and the constant row c (last row).
class StructuralParams {
 public:
  StructuralParams(ModelDims dims, Matrix a0, Matrix aplus);

  const ModelDims& dims() const { return dims_; }
  const Matrix& a0() const { return a0_; }
  const Matrix& aplus() const { return aplus_; }

  /// n x n coefficient block A_l, 1 <= l <= p.
  Matrix lag(int l) const;

  /// (A0 P, A+ P).
  StructuralParams rotated(const Matrix& p) const;

 private:
  ModelDims dims_;
  Matrix a0_;
  Matrix aplus_;
};

/// (B, Sigma) with Sigma symmetric positive definite.
class ReducedFormParams {
 public:
  ReducedFormParams(ModelDims dims, Matrix b, Matrix sigma);

  const ModelDims& dims() const { return dims_; }
  const Matrix& b() const { return b_; }
  const Matrix& sigma() const { return sigma_; }

 private:
  ModelDims dims_;
  Matrix b_;
  Matrix sigma_;
};

/// True when A0 has full numerical rank.
bool is_invertible(const Matrix& a0);

/// g(A0, A+) = (A+ A0^{-1}, (A0 A0')^{-1}).  Throws Error(SingularA0).
ReducedFormParams to_reduced_form(const StructuralParams& s);

/// The recursive point A0' = L^{-1}, A+ = B (L^{-1})' with L = chol(Sigma).
StructuralParams baseline_structural(const ReducedFormParams& r);

/// IR_0 = (A0^{-1})'.
Matrix contemporaneous_ir(const Matrix& a0);

/// Impulse responses at horizon h: entry (i, j) is the response of
/// variable i to structural shock j, h periods after impact.
Matrix ir_horizon(const StructuralParams& s, int h);

/// Companion matrix of the lag coefficients of B (np x np, row convention).
Matrix companion_matrix(const Matrix& b, const ModelDims& dims);

}  // namespace svarid
