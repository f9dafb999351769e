#include "cmv/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace cmv {

DenseC DenseC::identity(i64 n) {
  DenseC m(n, n);
  for (i64 i = 0; i < n; ++i) m.at(i, i) = 1.0;
  return m;
}

DenseC DenseC::mul(const DenseC& o) const {
  DenseC r(rows, o.cols);
  for (i64 i = 0; i < rows; ++i)
    for (i64 k = 0; k < cols; ++k) {
      Cx v = at(i, k);
      if (v == Cx(0.0, 0.0)) continue;
      for (i64 j = 0; j < o.cols; ++j) r.at(i, j) += v * o.at(k, j);
    }
  return r;
}

DenseC DenseC::adjoint() const {
  DenseC r(cols, rows);
  for (i64 i = 0; i < rows; ++i)
    for (i64 j = 0; j < cols; ++j) r.at(j, i) = std::conj(at(i, j));
  return r;
}

double DenseC::max_abs() const {
  double m = 0.0;
  for (const Cx& v : a) m = std::max(m, std::abs(v));
  return m;
}

double DenseC::max_abs_diff(const DenseC& o) const {
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - o.a[i]));
  return m;
}

EigResult dense_eig(const DenseC& A) {
  if (A.rows != A.cols) throw std::invalid_argument("dense_eig: not square");
  lapack_int n = static_cast<lapack_int>(A.rows);
  std::vector<Cx> a = A.a;  // zgeev overwrites
  std::vector<Cx> w(static_cast<size_t>(n));
  std::vector<Cx> vr(static_cast<size_t>(n) * n);
  // LAPACKE's row-major checks want ldvl >= n even though jobvl='N'
  lapack_int info = LAPACKE_zgeev(
      LAPACK_ROW_MAJOR, 'N', 'V', n,
      reinterpret_cast<lapack_complex_double*>(a.data()), n,
      reinterpret_cast<lapack_complex_double*>(w.data()), nullptr, n,
      reinterpret_cast<lapack_complex_double*>(vr.data()), n);
  if (info != 0) throw NumericError("zgeev failed, info=" + std::to_string(info));
  EigResult res;
  res.values = std::move(w);
  res.vectors = DenseC(A.rows, A.rows);
  res.vectors.a = std::move(vr);
  // residual check
  double worst = 0.0;
  for (i64 j = 0; j < A.rows; ++j) {
    double r2 = 0.0;
    for (i64 i = 0; i < A.rows; ++i) {
      Cx acc = -res.values[static_cast<size_t>(j)] * res.vectors.at(i, j);
      for (i64 k = 0; k < A.cols; ++k) acc += A.at(i, k) * res.vectors.at(k, j);
      r2 += std::norm(acc);
    }
    worst = std::max(worst, std::sqrt(r2));
  }
  res.max_residual = worst;
  return res;
}

// ---- banded unitary path ----------------------------------------------------

namespace {

// y = H x for a Hermitian matrix stored as diagonals -kb..kb of dense H.
struct BandedHermitian {
  i64 n = 0;
  int kb = 0;
  // diag[d + kb][i] = H(i, i + d) for d in [-kb, kb], valid i
  std::vector<std::vector<Cx>> diag;

  static BandedHermitian from_dense(const DenseC& H, int kb) {
    BandedHermitian b;
    b.n = H.rows;
    b.kb = kb;
    b.diag.assign(static_cast<size_t>(2 * kb + 1), {});
    for (int d = -kb; d <= kb; ++d) {
      auto& v = b.diag[static_cast<size_t>(d + kb)];
      v.assign(static_cast<size_t>(b.n), Cx(0.0, 0.0));
      for (i64 i = std::max<i64>(0, -d); i < b.n && i + d < b.n; ++i)
        if (i + d >= 0) v[static_cast<size_t>(i)] = H.at(i, i + d);
    }
    return b;
  }

  void apply(const Cx* x, Cx* y) const {
    for (i64 i = 0; i < n; ++i) {
      Cx acc(0.0, 0.0);
      for (int d = -kb; d <= kb; ++d) {
        i64 j = i + d;
        if (j < 0 || j >= n) continue;
        acc += diag[static_cast<size_t>(d + kb)][static_cast<size_t>(i)] *
               x[static_cast<size_t>(j)];
      }
      y[static_cast<size_t>(i)] = acc;
    }
  }
};

}  // namespace

EigResult unitary_band_eig(const DenseC& U, int kl, int ku) {
  if (U.rows != U.cols)
    throw std::invalid_argument("unitary_band_eig: not square");
  const i64 n = U.rows;
  const int kb = std::max(kl, ku);  // bandwidth of the Hermitian parts

  // Hermitian and anti-Hermitian parts; both have bandwidth kb.
  DenseC A(n, n), B(n, n);
  for (i64 i = 0; i < n; ++i)
    for (i64 d = -kb; d <= kb; ++d) {
      i64 j = i + d;
      if (j < 0 || j >= n) continue;
      Cx u = U.at(i, j), ustar = std::conj(U.at(j, i));
      A.at(i, j) = 0.5 * (u + ustar);
      B.at(i, j) = Cx(0.0, -0.5) * (u - ustar);
    }

  // Banded Hermitian eigensolve of A (column-major banded storage, uplo='L').
  lapack_int ln = static_cast<lapack_int>(n);
  lapack_int ldab = kb + 1;
  std::vector<Cx> ab(static_cast<size_t>(ldab) * n, Cx(0.0, 0.0));
  for (i64 j = 0; j < n; ++j)
    for (i64 i = j; i <= std::min<i64>(n - 1, j + kb); ++i)
      ab[static_cast<size_t>((i - j) + j * ldab)] = A.at(i, j);
  std::vector<double> w(static_cast<size_t>(n));
  std::vector<Cx> z(static_cast<size_t>(n) * n);
  lapack_int info = LAPACKE_zhbevd(
      LAPACK_COL_MAJOR, 'V', 'L', ln, kb,
      reinterpret_cast<lapack_complex_double*>(ab.data()), ldab, w.data(),
      reinterpret_cast<lapack_complex_double*>(z.data()), ln);
  if (info != 0)
    throw NumericError("zhbevd failed, info=" + std::to_string(info));

  BandedHermitian Bb = BandedHermitian::from_dense(B, kb);
  BandedHermitian Ab = BandedHermitian::from_dense(A, kb);

  // Column-major accessor into z.
  auto zcol = [&](i64 j) { return z.data() + static_cast<size_t>(j) * n; };

  EigResult res;
  res.values.assign(static_cast<size_t>(n), Cx(0.0, 0.0));
  res.vectors = DenseC(n, n);

  const double clusterTol = 1e-7;
  std::vector<Cx> work(static_cast<size_t>(n));
  i64 lo = 0;
  while (lo < n) {
    i64 hi = lo;
    while (hi + 1 < n && w[static_cast<size_t>(hi + 1)] -
                             w[static_cast<size_t>(hi)] <=
                             clusterTol)
      ++hi;
    i64 k = hi - lo + 1;
    // Project B onto the cluster and diagonalize the small block.
    std::vector<Cx> bw(static_cast<size_t>(k) * n);  // B * V_c, column-major
    for (i64 c = 0; c < k; ++c)
      Bb.apply(zcol(lo + c), bw.data() + static_cast<size_t>(c) * n);
    std::vector<Cx> hb(static_cast<size_t>(k) * k);  // V_c^* (B V_c)
    for (i64 c1 = 0; c1 < k; ++c1)
      for (i64 c2 = 0; c2 < k; ++c2) {
        Cx acc(0.0, 0.0);
        const Cx* v1 = zcol(lo + c1);
        const Cx* v2 = bw.data() + static_cast<size_t>(c2) * n;
        for (i64 i = 0; i < n; ++i)
          acc += std::conj(v1[static_cast<size_t>(i)]) *
                 v2[static_cast<size_t>(i)];
        hb[static_cast<size_t>(c1 + c2 * k)] = acc;  // col-major
      }
    std::vector<double> mu(static_cast<size_t>(k));
    if (k == 1) {
      mu[0] = hb[0].real();
      for (i64 i = 0; i < n; ++i) res.vectors.at(i, lo) = zcol(lo)[i];
    } else {
      lapack_int lk = static_cast<lapack_int>(k);
      info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', lk,
                            reinterpret_cast<lapack_complex_double*>(hb.data()),
                            lk, mu.data());
      if (info != 0)
        throw NumericError("zheevd cluster solve failed, info=" +
                           std::to_string(info));
      // Rotate the cluster columns: V_new = V_c * S.
      for (i64 c = 0; c < k; ++c) {
        for (i64 i = 0; i < n; ++i) work[static_cast<size_t>(i)] = Cx(0.0, 0.0);
        for (i64 s = 0; s < k; ++s) {
          Cx coef = hb[static_cast<size_t>(s + c * k)];
          const Cx* v = zcol(lo + s);
          for (i64 i = 0; i < n; ++i)
            work[static_cast<size_t>(i)] += coef * v[static_cast<size_t>(i)];
        }
        for (i64 i = 0; i < n; ++i)
          res.vectors.at(i, lo + c) = work[static_cast<size_t>(i)];
      }
    }
    // Rayleigh value lambda = v^* A v + i v^* B v per column.
    for (i64 c = 0; c < k; ++c) {
      std::vector<Cx> col(static_cast<size_t>(n));
      for (i64 i = 0; i < n; ++i) col[static_cast<size_t>(i)] =
          res.vectors.at(i, lo + c);
      Ab.apply(col.data(), work.data());
      Cx ra(0.0, 0.0);
      for (i64 i = 0; i < n; ++i)
        ra += std::conj(col[static_cast<size_t>(i)]) * work[static_cast<size_t>(i)];
      Bb.apply(col.data(), work.data());
      Cx rb(0.0, 0.0);
      for (i64 i = 0; i < n; ++i)
        rb += std::conj(col[static_cast<size_t>(i)]) * work[static_cast<size_t>(i)];
      res.values[static_cast<size_t>(lo + c)] = Cx(ra.real(), rb.real());
    }
    lo = hi + 1;
  }

  // Residual check against U itself (banded product).
  double worst = 0.0;
  for (i64 j = 0; j < n; ++j) {
    double r2 = 0.0, n2 = 0.0;
    for (i64 i = 0; i < n; ++i) {
      Cx acc = -res.values[static_cast<size_t>(j)] * res.vectors.at(i, j);
      for (i64 d = -kl; d <= ku; ++d) {
        i64 c = i + d;
        if (c < 0 || c >= n) continue;
        acc += U.at(i, c) * res.vectors.at(c, j);
      }
      r2 += std::norm(acc);
      n2 += std::norm(res.vectors.at(i, j));
    }
    worst = std::max(worst, std::sqrt(r2 / std::max(n2, 1e-300)));
  }
  res.max_residual = worst;
  if (worst > 1e-7)
    throw NumericError("unitary_band_eig: residual " + std::to_string(worst));
  return res;
}

}  // namespace cmv
