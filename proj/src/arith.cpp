#include "cmv/arith.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cmv::ar {

DD two_sum(double a, double b) {
  double s = a + b;
  double bb = s - a;
  double err = (a - (s - bb)) + (b - bb);
  return {s, err};
}

DD quick_two_sum(double a, double b) {
  double s = a + b;
  return {s, b - (s - a)};
}

DD two_prod(double a, double b) {
  double p = a * b;
  return {p, std::fma(a, b, -p)};
}

DD dd_add(DD a, double b) {
  DD s = two_sum(a.hi, b);
  return quick_two_sum(s.hi, s.lo + a.lo);
}

DD dd_add(DD a, DD b) {
  DD s = two_sum(a.hi, b.hi);
  return quick_two_sum(s.hi, s.lo + a.lo + b.lo);
}

DD dd_reduce_mod1(DD x) {
  double k = std::nearbyint(x.hi);
  DD r = two_sum(x.hi, -k);
  DD out = quick_two_sum(r.hi, r.lo + x.lo);
  double v = out.value();
  if (v > 0.5)
    out = dd_add(out, -1.0);
  else if (v < -0.5)
    out = dd_add(out, 1.0);
  return out;
}

double torus_norm_dd(double twoOmega, double beta, i64 n) {
  DD x = two_prod(beta, static_cast<double>(n));
  x = dd_add(x, twoOmega);
  return std::abs(dd_reduce_mod1(x).value());
}

double group_distance(const GroupSpec& g, const GroupPoint& beta,
                      const GroupPoint& omega, i64 n) {
  if (static_cast<int>(beta.torus.size()) != g.torusDim ||
      static_cast<int>(omega.torus.size()) != g.torusDim ||
      beta.cyclic.size() != g.cyclicDim() ||
      omega.cyclic.size() != g.cyclicDim())
    throw std::invalid_argument("group_distance: point/group shape mismatch");
  double d = 0.0;
  for (int i = 0; i < g.torusDim; ++i)
    d = std::max(d, torus_norm_dd(2.0 * omega.torus[static_cast<size_t>(i)],
                                  beta.torus[static_cast<size_t>(i)], n));
  for (size_t i = 0; i < g.cyclicDim(); ++i) {
    i64 q = g.cyclicMods[i];
    if (q < 2) throw std::invalid_argument("group_distance: modulus must be >= 2");
    __int128 v = static_cast<__int128>(2) * omega.cyclic[i] +
                 static_cast<__int128>(n) * beta.cyclic[i];
    i64 j = static_cast<i64>(((v % q) + q) % q);
    if (j != 0) d = std::max(d, 1.0);
  }
  return d;
}

DeltaResult delta_estimate(const GroupSpec& g, const GroupPoint& beta,
                           const GroupPoint& omega, i64 nMax, i64 nMin) {
  if (nMin < 1 || nMax < nMin)
    throw std::invalid_argument("delta_estimate: need 1 <= nMin <= nMax");
  DeltaResult res;
  res.delta = -std::numeric_limits<double>::infinity();
  for (i64 n = nMin; n <= nMax; ++n) {
    for (int sgn = 0; sgn < 2; ++sgn) {
      i64 ns = sgn == 0 ? n : -n;
      double d = group_distance(g, beta, omega, ns);
      if (d == 0.0) {
        res.delta = std::numeric_limits<double>::infinity();
        res.infinite = true;
        res.witness = ns;
        res.witnessDist = 0.0;
        return res;
      }
      double rate = -std::log(d) / static_cast<double>(n);
      if (rate > res.delta) {
        res.delta = rate;
        res.witness = ns;
        res.witnessDist = d;
      }
    }
  }
  return res;
}

double golden_frequency() { return (std::sqrt(5.0) - 1.0) / 2.0; }

TunedPhase liouville_phase(double phi, double targetRate, u64 seed) {
  if (!(targetRate > 0.0))
    throw std::invalid_argument("liouville_phase: targetRate must be > 0");
  const double margin = 1.05;
  // Keep the pinned distance at least ~8 ulps of 2*theta above zero.
  const double logBudget = 49.0 * 0.6931471805599453;
  i64 mJ = static_cast<i64>(std::floor(logBudget / (margin * targetRate)));
  if (mJ < 1)
    throw std::invalid_argument("liouville_phase: rate beyond double range");
  const double dJ = std::exp(-margin * targetRate * static_cast<double>(mJ));

  auto reduced = [&](double th) {
    DD x = two_prod(phi, static_cast<double>(mJ));
    x = dd_add(x, 2.0 * th);
    return dd_reduce_mod1(x);
  };

  for (int attempt = 0; attempt < 16; ++attempt) {
    double theta0 =
        0.25 + 0.5 * unit_double(splitmix64(
                         seed + static_cast<u64>(attempt) * 0x9e3779b97f4a7c15ULL));
    double x0 = reduced(theta0).value();
    double side = x0 >= 0.0 ? 1.0 : -1.0;
    double theta = theta0 + (side * dJ - x0) / 2.0;

    // The rounding of theta quantizes the reachable distances; walk a few
    // ulps and keep the largest distance that still certifies the rate.
    double step = std::ldexp(1.0, std::ilogb(theta) - 52);
    TunedPhase best;
    best.rate = -1.0;
    for (int k = -64; k <= 64; ++k) {
      double cand = theta + static_cast<double>(k) * step;
      double d = std::abs(reduced(cand).value());
      if (d == 0.0 || d > dJ) continue;
      if (best.rate < 0.0 || d > best.distance) {
        best.theta = cand;
        best.distance = d;
        best.witness = mJ;
        best.rate = -std::log(d) / static_cast<double>(mJ);
      }
    }
    if (best.rate >= targetRate) return best;
  }
  throw NumericError("liouville_phase: could not pin the requested rate");
}

}  // namespace cmv::ar
