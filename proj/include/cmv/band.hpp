// The five-diagonal unitary built from a coefficient sequence, its
// factorization into two block-diagonal layers of 2x2 unitaries, finite
// unitary truncations, and diagonal gauge search.
//
// Row stencils (four entries each, columns r-1..r+2 for even r and r-2..r+1
// for odd r):
//   row 2n  : [ conj(a_2n) conj(p_{2n-1}),  -conj(a_2n) a_{2n-1},
//               conj(a_{2n+1}) p_2n,         p_{2n+1} p_2n ]
//   row 2n+1: [ conj(p_2n) conj(p_{2n-1}),  -conj(p_2n) a_{2n-1},
//              -conj(a_{2n+1}) a_2n,        -p_{2n+1} a_2n ]
// with a = alpha, p = rho. The (0,0) entry is -conj(a_0) a_{-1}.
#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "cmv/linalg.hpp"
#include "cmv/sequence.hpp"

namespace cmv::op {

// Theta(alpha, rho) = [[conj(alpha), rho], [conj(rho), -alpha]]; unitary when
// |alpha|^2 + |rho|^2 = 1, enforced to 1e-9.
Mat2C theta_block(Cx alpha, Cx rho);

struct GECMVBand {
  i64 rowLo = 0, rowHi = -1;
  std::vector<std::array<Cx, 4>> rows;  // entry j sits at column col_start(r)+j

  static i64 col_start(i64 r) { return (r & 1) ? r - 2 : r - 1; }

  const std::array<Cx, 4>& row(i64 r) const {
    return rows[static_cast<size_t>(r - rowLo)];
  }
  // Entry (r, c) of the doubly infinite matrix restricted to stored rows;
  // zero off the stencil.
  Cx at(i64 r, i64 c) const;
};

GECMVBand build_gecmv(const CoefficientSequence& seq, i64 rowLo, i64 rowHi);

// [E u](n) straight from the coordinate formulas; u spans indices
// [uStart, uStart + u.size()), which must cover n-1 .. n+2.
Cx apply_at(const CoefficientSequence& seq, std::span<const Cx> u, i64 uStart,
            i64 n);

// Band-times-vector for all stored rows; u must cover every stencil column.
std::vector<Cx> band_matvec(const GECMVBand& band, std::span<const Cx> u,
                            i64 uStart);

// Max abs difference over rows [rowLo, rowHi] between the direct band entries
// and the product of the two Theta layers (computed blockwise, no dense
// matrices). The layers the product uses: even blocks Theta(a_2n, p_2n) on
// {2n, 2n+1}, odd blocks Theta(a_{2n+1}, p_{2n+1}) on {2n+1, 2n+2}.
double lm_check(const CoefficientSequence& seq, i64 rowLo, i64 rowHi);

// Residuals of the two layer eigenvalue relations on sampled data:
//   conj(p_{2n-1}) u(2n-1) - a_{2n-1} u(2n)   = z (a_2n u(2n) + p_2n u(2n+1))
//   conj(a_{2n+1}) u(2n+1) + p_{2n+1} u(2n+2) = z (conj(p_2n) u(2n) - conj(a_2n) u(2n+1))
// Max over n in [nLo, nHi]; u must cover sites 2*nLo-1 .. 2*nHi+2.
double layer_eig_residual(const CoefficientSequence& seq, Cx z,
                          std::span<const Cx> u, i64 uStart, i64 nLo, i64 nHi);

struct TruncatedUnitary {
  i64 a = 0, b = -1;     // site window, a even, b odd
  DenseC u;              // (b-a+1) x (b-a+1)
  std::string boundary;  // human-readable note on the cut convention
};

// Finite unitary on sites [a, b]: the two coefficients straddling the cuts
// (indices a-1 and b) are replaced by 1 (rho = 0), which decouples the block;
// the block is then the product of the two Theta layers.
TruncatedUnitary truncate_unitary(const CoefficientSequence& seq, i64 a, i64 b);

struct GaugeResult {
  i64 lo = 0;
  std::vector<Cx> phases;  // lambda_n for sites lo .. lo+size-1, |lambda| = 1
  double residual = 0.0;   // max |lambda_r A(r,c) conj(lambda_c) - B(r,c)|
};

// Greedy entry-by-entry search for a unimodular diagonal Lambda with
// Lambda A Lambda^* = B over rows [lo, hi] (both bands restricted to columns
// in the same window). Always returns the best phases found; `residual`
// reports how well they close.
GaugeResult find_diagonal_gauge(const CoefficientSequence& seqA,
                                const CoefficientSequence& seqB, i64 lo, i64 hi);

}  // namespace cmv::op
