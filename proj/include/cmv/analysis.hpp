// Spectral estimation and certification: Lyapunov exponents from restarted
// orbit averages of the cocycle, reflection-symmetry certificates over
// center/rate grids, the one-sided delocalization verdict 2L < B, and
// inverse-participation diagnostics on unitary truncations.
#pragma once

#include <utility>
#include <vector>

#include "cmv/sequence.hpp"
#include "cmv/types.hpp"

namespace cmv::an {

// ---- Lyapunov exponent ------------------------------------------------------

struct LyapunovOptions {
  i64 steps = 10000;   // transfer steps per orbit segment
  int restarts = 4;    // consecutive segments averaged
  i64 startIndex = 0;  // first segment starts at this step index
  bool trace = false;  // record partial estimates at doubling step counts
};

struct LyapunovEstimate {
  Cx z;
  double value = 0.0;        // log-norm growth per site: log||prod|| / (2 steps)
  double uncertainty = 0.0;  // scatter of the restart estimates (sem)
  i64 steps = 0;
  int restarts = 0;
  std::vector<double> segments;                 // per-restart estimates
  std::vector<std::pair<i64, double>> trace;    // (steps, partial estimate)
};

LyapunovEstimate lyapunov(const CoefficientSequence& seq, Cx z,
                          const LyapunovOptions& opt = {});

// Closed-form growth rate of the two-coin walk cocycle on its spectrum,
// log[l2 (1 + l1') / (l1 (1 + l2'))] with l' = sqrt(1 - l^2). This is the
// rate per transfer factor; one factor spans two sites, so it equals twice
// the per-site exponent reported by lyapunov(). Positive in the localized
// regime l1 < l2, zero at l1 = l2, negative if swapped.
double uamo_exponent_closed_form(double lambda1, double lambda2);

// ---- reflectivity certificates ------------------------------------------------

// A sequence is (B, zeta)-reflective when |alpha_{2 zeta - n} - conj(alpha_n)|
// stays below exp(-B |zeta|) across the window |n - zeta| <= exp(B |zeta|).
struct ReflectivityCertificate {
  double B = 0.0;
  i64 twoZeta = 0;          // centers live on the half-integers
  i64 effectiveWindow = 0;  // min(exp(B |zeta|), data window)
  double maxAlphaDev = 0.0;
  double maxRhoDev = 0.0;   // complexified-rho mirror defect
  bool pass = false;        // maxAlphaDev < exp(-B |zeta|)
};

// One certificate per (B, center) pair; centers scan twoZeta in
// [twoZetaLo, twoZetaHi] (step 1/2), windows capped by dataWindow.
std::vector<ReflectivityCertificate> reflectivity_scan(
    const CoefficientSequence& seq, const std::vector<double>& bGrid,
    i64 twoZetaLo, i64 twoZetaHi, i64 dataWindow);

// A-priori deviation bound of the two-coin walk at the integer center
// zeta = m - 1: the cosine coding is Lipschitz, so the mirror defect is at
// most 2 pi lambda2 || 2 theta + m phi ||.
double uamo_reflectivity_bound(double lambda2, double phi, double theta, i64 m);

// ---- delocalization verdict ---------------------------------------------------

// One-sided test: rules point spectrum out at z when twice the exponent
// (inflated by its uncertainty) stays below the certified rate (deflated by
// its uncertainty); anything else is inconclusive. Never asserts presence.
struct CriterionVerdict {
  Cx z;
  double L = 0.0, Lunc = 0.0;
  double B = 0.0, Bunc = 0.0;
  bool noEigenvalue = false;

  const char* text() const { return noEigenvalue ? "no-eigenvalue" : "inconclusive"; }
};

CriterionVerdict delocalization_verdict(Cx z, double L, double Lunc, double B,
                                        double Bunc = 0.0);

// ---- finite-volume diagnostics ------------------------------------------------

struct IprTable {
  std::vector<Cx> eig;       // unimodular eigenvalues of the truncation
  std::vector<double> ipr;   // sum |psi|^4 per unit-l2 eigenvector
  double median = 0.0;
  double maxResidual = 0.0;
};

// Eigendecomposition of the decoupled truncation over sites [a, b]
// (a even, b odd, at most 4096 sites) plus per-state participation.
IprTable ipr_diagnostics(const CoefficientSequence& seq, i64 a, i64 b);

}  // namespace cmv::an
