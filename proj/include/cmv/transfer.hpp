// Transfer matrices and the cocycle built on them.
//
// Solutions of the generalized eigenvalue equation E u = z u are propagated
// through 2x2 steps. Two equivalent routes exist:
//
//   M_n : [u(2n-1), u(2n-2)]^t -> [u(2n+1), u(2n)]^t
//   N_n : [u(2n),   u(2n-1)]^t -> [u(2n+2), u(2n+1)]^t
//
// Both are instances of one coefficient pattern
//
//   X(a, b, c, r_a, r_b, r_c, w) = 1/(r_a r_b) *
//     [ w^-1 + a conj(b) + b conj(c) + a conj(c) w,  -conj(r_c) (b + a w) ]
//     [ -r_a (conj(b) + conj(c) w),                   r_a conj(r_c) w     ]
//
// with M_n = X(alpha_2n, alpha_{2n-1}, alpha_{2n-2}, rho_2n, rho_{2n-1},
// rho_{2n-2}, z) and N_n the same pattern at conjugated odd-position
// arguments and w = 1/z. det X = conj(r_b) conj(r_c) / (r_a r_b), so the
// steps are invertible whenever every rho is nonzero.
//
// The mirrored step is the antidiagonal conjugation sigma N sigma; it runs
// the same recursion through a reflected coefficient window and is the
// comparison object for the reflection identities.
#pragma once

#include <array>
#include <vector>

#include "cmv/sequence.hpp"
#include "cmv/types.hpp"

namespace cmv::tm {

// The shared coefficient pattern. Throws NumericError when |r_a|, |r_b| or
// |w| fall below kRhoFloor (the step would divide by ~0).
Mat2C xmat(Cx a, Cx b, Cx c, Cx ra, Cx rb, Cx rc, Cx w);

Mat2C transfer_M(const CoefficientSequence& seq, i64 n, Cx z);
Mat2C transfer_N(const CoefficientSequence& seq, i64 n, Cx z);
// Closed-form inverse of transfer_N (cheaper and better conditioned than
// going through the adjugate of the evaluated matrix).
Mat2C transfer_N_inv(const CoefficientSequence& seq, i64 n, Cx z);
// sigma N_n sigma with sigma the antidiagonal flip.
Mat2C transfer_N_mirror(const CoefficientSequence& seq, i64 n, Cx z);

inline std::array<Cx, 2> mat_vec(const Mat2C& m, const std::array<Cx, 2>& v) {
  return {m.a * v[0] + m.b * v[1], m.c * v[0] + m.d * v[1]};
}

// ---- scaled products --------------------------------------------------------

// Running 2x2 product that keeps a separate power-of-two scale so that
// exponentially growing or decaying products never leave double range.
// Power-of-two rescaling is exact, so the stored entries carry only the
// usual multiplication rounding.
struct ScaledProduct {
  Mat2C mat = Mat2C::identity();
  i64 twoExp = 0;  // true product = mat * 2^twoExp
  int rescales = 0;

  void absorb_left(const Mat2C& step);   // mat <- step * mat
  void absorb_right(const Mat2C& step);  // mat <- mat * step

  double log_max_abs() const;
  double log_norm2() const;  // log of the operator 2-norm of the true product

  // True product as a plain matrix; NumericError if it does not fit in
  // double range.
  Mat2C materialize() const;

  // Fold scale into logScale so that max_abs(mat) lands in [1, 2).
  void normalize_final();

 private:
  void maybe_rescale();
};

enum class StepKind { M, N, NInv, NMirror };

// Ordered product of transfer steps for n in [nLo, nHi]:
//   M, N, NMirror :  T_nHi * T_{nHi-1} * ... * T_nLo   (later steps act last)
//   NInv          :  T_nLo * T_{nLo+1} * ... * T_nHi
// so that product(N, 0, n-1) maps Phi(0) to Phi(n) and product(NInv, 0, n-1)
// is exactly its inverse.
ScaledProduct product_scaled(const CoefficientSequence& seq, StepKind kind,
                             i64 nLo, i64 nHi, Cx z);

// ---- propagated solutions ---------------------------------------------------

// Contiguous samples u(siteLo) .. u(siteLo + size - 1) of one solution.
// complete=false means a propagation leg hit the double-range guard and the
// slice covers less than was asked for.
struct SolutionSlice {
  i64 siteLo = 0;
  std::vector<Cx> samples;
  bool complete = true;

  i64 siteHi() const { return siteLo + static_cast<i64>(samples.size()) - 1; }
  bool covers(i64 k) const { return k >= siteLo && k <= siteHi(); }
  Cx at(i64 k) const;

  // Scale all samples so the l2 norm over sites [a, b] becomes 1.
  void normalize_window(i64 a, i64 b);
};

// Phi(n) = [u(2n), u(2n-1)] read off a slice.
std::array<Cx, 2> phi(const SolutionSlice& u, i64 n);

// Grow the solution anchored at Phi(n0) = [uEven, uOdd] until it covers
// sites [2 nLo - 1, 2 nHi] (N steps up, closed-form inverse steps down).
SolutionSlice propagate(const CoefficientSequence& seq, Cx z, Cx uEven, Cx uOdd,
                        i64 n0, i64 nLo, i64 nHi);

// Same recursion through the M pairs [u(2n+1), u(2n)], upward only. Anchored
// at n0 with the pair [uOddTop, uEven]; covers sites [2 n0, 2 nHi + 1].
SolutionSlice propagate_m(const CoefficientSequence& seq, Cx z, Cx uOddTop,
                          Cx uEven, i64 n0, i64 nHi);

// Reflected samples v(k) = u(4m - 1 - k) on the window where u is defined.
SolutionSlice reflect_slice(const SolutionSlice& u, i64 m);

// ---- Wronskian calculus -----------------------------------------------------

// W(u, v)(n) = rho_{2n+1} * prod_{k=0}^{2n} (rho_k / conj(rho_k))
//              * (u(2n+2) v(2n+1) - u(2n+1) v(2n+2)),   n >= 0.
// For two exact solutions at the same z this is independent of n and equals
// conj(rho_{-1}) (u(0) v(-1) - u(-1) v(0)).
Cx wronskian_at(const CoefficientSequence& seq, const SolutionSlice& u,
                const SolutionSlice& v, i64 n);
std::vector<Cx> wronskian_series(const CoefficientSequence& seq,
                                 const SolutionSlice& u,
                                 const SolutionSlice& v, i64 nLo, i64 nHi);
// max_n |W(n) - W(n-1)| over n in [nLo+1, nHi].
double wronskian_drift(const CoefficientSequence& seq, const SolutionSlice& u,
                       const SolutionSlice& v, i64 nLo, i64 nHi);
Cx wronskian_initial(const CoefficientSequence& seq, const SolutionSlice& u,
                     const SolutionSlice& v);

// Closed-form expansion of one Wronskian increment for the pair
// (u, reflection of u through m). Every coefficient bracket measures how far
// the sequence is from reflection symmetry, so the expansion vanishes
// identically on exactly symmetric windows. Derived in the complexified rho
// convention; lhs is |W(n) - W(n-1)| from samples, rhs the expansion, diff
// their gap.
struct IdentityReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double diff = 0.0;
};
IdentityReport wronskian_increment_identity(const CoefficientSequence& seq,
                                            Cx z, const SolutionSlice& u,
                                            i64 m, i64 n);

// Wronskian drift diagnostics for a solution against its own reflection at
// the center zeta = 2m - 1. The solution is grown from the anchor pair at
// Phi(m) across sites [-1, 4m] (optionally normalized to unit l2 over
// [0, 4m]), reflected, and the increment table |W(n) - W(n-1)| recorded over
// the n-range [1, 2m-2] where both slices are defined. For sequences exactly
// reflection-symmetric about zeta (complexified rho) the increments sit at
// rounding level; the l1 sum obeys sum_n |W| <= 2 for normalized u.
struct ReflectedDrift {
  i64 m = 0;
  SolutionSlice u;
  std::vector<double> increments;
  double maxIncrement = 0.0;
  double l1 = 0.0;
};
ReflectedDrift reflected_drift(const CoefficientSequence& seq, Cx z, i64 m,
                               Cx uEven, Cx uOdd, bool normalize);

// Even/odd split against the reflection through m: uPlus = u + v and
// uMinus = u - v with v the reflected slice, on the overlap window. smallSign
// reports which branch has the smaller Phi(m) (that branch vanishes
// identically when u is itself (anti)symmetric).
struct ReflectionSplit {
  SolutionSlice plus, minus;
  int smallSign = +1;
  double phiNormPlus = 0.0, phiNormMinus = 0.0;
};
ReflectionSplit reflection_split(const SolutionSlice& u, i64 m);

}  // namespace cmv::tm
