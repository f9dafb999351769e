// Small dense complex-matrix helpers and the eigensolvers used for
// truncation diagnostics. The banded-unitary path diagonalizes the Hermitian
// part with a banded solver and resolves conjugate-pair clusters with the
// anti-Hermitian part, which is far cheaper than a general nonsymmetric
// solve and exact for normal matrices.
#pragma once

#include <vector>

#include "cmv/types.hpp"

namespace cmv {

struct DenseC {
  i64 rows = 0, cols = 0;
  std::vector<Cx> a;  // row-major

  DenseC() = default;
  DenseC(i64 r, i64 c) : rows(r), cols(c), a(static_cast<size_t>(r * c)) {}

  Cx& at(i64 i, i64 j) { return a[static_cast<size_t>(i * cols + j)]; }
  const Cx& at(i64 i, i64 j) const {
    return a[static_cast<size_t>(i * cols + j)];
  }

  static DenseC identity(i64 n);
  DenseC mul(const DenseC& o) const;      // naive, for small matrices
  DenseC adjoint() const;
  double max_abs() const;
  double max_abs_diff(const DenseC& o) const;
};

struct EigResult {
  std::vector<Cx> values;
  DenseC vectors;          // columns, unit Euclidean norm
  double max_residual = 0; // max_j ||A v_j - lambda_j v_j||_2
};

// General dense eigensolve (LAPACK zgeev). Intended for small matrices.
EigResult dense_eig(const DenseC& A);

// Eigendecomposition of a unitary matrix with small bandwidth (lower bw
// `kl`, upper bw `ku`). Throws NumericError if the residual check fails.
EigResult unitary_band_eig(const DenseC& U, int kl, int ku);

}  // namespace cmv
