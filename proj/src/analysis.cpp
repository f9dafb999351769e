#include "cmv/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cmv/arith.hpp"
#include "cmv/band.hpp"
#include "cmv/linalg.hpp"
#include "cmv/models.hpp"
#include "cmv/transfer.hpp"

namespace cmv::an {

LyapunovEstimate lyapunov(const CoefficientSequence& seq, Cx z,
                          const LyapunovOptions& opt) {
  if (opt.steps < 1 || opt.restarts < 1)
    throw std::invalid_argument("lyapunov: steps and restarts must be >= 1");

  // Hot loop: memoize the touched coefficient window unless the caller
  // already did (or it would be unreasonably large).
  const CoefficientSequence* sp = &seq;
  CoefficientSequence local;
  i64 lastStep = opt.startIndex + static_cast<i64>(opt.restarts) * opt.steps;
  i64 lo = 2 * opt.startIndex - 1, hi = 2 * lastStep + 1;
  if (!seq.has_memo() && hi - lo + 1 <= (i64{1} << 26)) {
    local = seq.materialized(lo, hi);
    sp = &local;
  }

  LyapunovEstimate out;
  out.z = z;
  out.steps = opt.steps;
  out.restarts = opt.restarts;
  out.segments.reserve(static_cast<size_t>(opt.restarts));
  for (int r = 0; r < opt.restarts; ++r) {
    i64 a = opt.startIndex + static_cast<i64>(r) * opt.steps;
    tm::ScaledProduct prod;
    i64 nextTrace = 1;
    for (i64 k = 0; k < opt.steps; ++k) {
      prod.absorb_left(tm::transfer_N(*sp, a + k, z));
      if (opt.trace && r == 0 && k + 1 == nextTrace) {
        out.trace.emplace_back(k + 1, prod.log_norm2() / (2.0 * (k + 1)));
        nextTrace *= 2;
      }
    }
    out.segments.push_back(prod.log_norm2() / (2.0 * opt.steps));
  }

  double mean = 0.0;
  for (double s : out.segments) mean += s;
  mean /= out.segments.size();
  out.value = mean;
  if (opt.restarts > 1) {
    double var = 0.0;
    for (double s : out.segments) var += (s - mean) * (s - mean);
    var /= (out.segments.size() - 1);
    out.uncertainty = std::sqrt(var / out.segments.size());
  }
  return out;
}

double uamo_exponent_closed_form(double lambda1, double lambda2) {
  if (!(lambda1 > 0.0 && lambda1 < 1.0 && lambda2 > 0.0 && lambda2 < 1.0))
    throw std::invalid_argument(
        "uamo_exponent_closed_form: couplings must lie in (0,1)");
  double l1p = std::sqrt(1.0 - lambda1 * lambda1);
  double l2p = std::sqrt(1.0 - lambda2 * lambda2);
  return std::log((lambda2 * (1.0 + l1p)) / (lambda1 * (1.0 + l2p)));
}

std::vector<ReflectivityCertificate> reflectivity_scan(
    const CoefficientSequence& seq, const std::vector<double>& bGrid,
    i64 twoZetaLo, i64 twoZetaHi, i64 dataWindow) {
  if (twoZetaHi < twoZetaLo)
    throw std::invalid_argument("reflectivity_scan: empty center range");
  if (dataWindow < 1)
    throw std::invalid_argument("reflectivity_scan: empty data window");

  std::vector<ReflectivityCertificate> out;
  out.reserve(bGrid.size() *
              static_cast<size_t>(twoZetaHi - twoZetaLo + 1));
  for (i64 tz = twoZetaLo; tz <= twoZetaHi; ++tz) {
    double absZeta = std::abs(static_cast<double>(tz)) / 2.0;
    for (double B : bGrid) {
      if (!(B > 0.0))
        throw std::invalid_argument("reflectivity_scan: rates must be > 0");
      ReflectivityCertificate c;
      c.B = B;
      c.twoZeta = tz;
      double w = std::exp(B * absZeta);
      c.effectiveWindow =
          w >= static_cast<double>(dataWindow)
              ? dataWindow
              : std::max<i64>(1, static_cast<i64>(std::floor(w)));

      // Scan every n with |n - zeta| <= effectiveWindow; each mirror pair is
      // visited from both ends, which only repeats the same modulus.
      i64 nLo = static_cast<i64>(
          std::ceil(static_cast<double>(tz) / 2.0 - c.effectiveWindow));
      i64 nHi = static_cast<i64>(
          std::floor(static_cast<double>(tz) / 2.0 + c.effectiveWindow));
      for (i64 n = nLo; n <= nHi; ++n) {
        Cx am = seq.alpha(tz - n), a = seq.alpha(n);
        c.maxAlphaDev = std::max(c.maxAlphaDev, std::abs(am - std::conj(a)));
        Cx rm = complexified_rho(am), r = complexified_rho(a);
        c.maxRhoDev = std::max(c.maxRhoDev, std::abs(rm + std::conj(r)));
      }
      c.pass = c.maxAlphaDev < std::exp(-B * absZeta);
      out.push_back(c);
    }
  }
  return out;
}

double uamo_reflectivity_bound(double lambda2, double phi, double theta,
                               i64 m) {
  return 2.0 * kPi * lambda2 *
         ar::torus_norm_dd(2.0 * models::mod1(theta), models::mod1(phi), m);
}

CriterionVerdict delocalization_verdict(Cx z, double L, double Lunc, double B,
                                        double Bunc) {
  CriterionVerdict v;
  v.z = z;
  v.L = L;
  v.Lunc = Lunc;
  v.B = B;
  v.Bunc = Bunc;
  v.noEigenvalue = 2.0 * (L + Lunc) < B - Bunc;
  return v;
}

IprTable ipr_diagnostics(const CoefficientSequence& seq, i64 a, i64 b) {
  op::TruncatedUnitary t = op::truncate_unitary(seq, a, b);
  EigResult e = unitary_band_eig(t.u, 2, 2);
  i64 n = b - a + 1;
  IprTable out;
  out.eig = e.values;
  out.maxResidual = e.max_residual;
  out.ipr.reserve(static_cast<size_t>(n));
  for (i64 j = 0; j < n; ++j) {
    double s = 0.0;
    for (i64 i = 0; i < n; ++i) {
      double p = std::norm(e.vectors.at(i, j));
      s += p * p;
    }
    out.ipr.push_back(s);
  }
  std::vector<double> sorted = out.ipr;
  std::sort(sorted.begin(), sorted.end());
  size_t mid = sorted.size() / 2;
  out.median = (sorted.size() % 2 == 1)
                   ? sorted[mid]
                   : 0.5 * (sorted[mid - 1] + sorted[mid]);
  return out;
}

}  // namespace cmv::an
