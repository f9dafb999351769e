// Compensated (double-double) arithmetic and quantitative recurrence
// estimates on products of tori and finite cyclic groups.
//
// The central quantity is
//
//   delta(beta, omega) = limsup_{|n| -> inf}  -log d(2 omega + n beta, 0) / |n|
//
// measured with the max metric over components: distance to the nearest
// integer on each torus coordinate, and the 0/1 discrete metric on each
// finite cyclic coordinate. Distances of interest sit many orders below the
// rounding error of a plain double evaluation of 2 omega + n beta, so the
// torus reduction is carried out in exact double-double steps: the inputs
// are doubles, n beta splits exactly via fma, and the nearest-integer
// subtraction is exact, leaving ~1e-32 resolution.
#pragma once

#include <vector>

#include "cmv/types.hpp"

namespace cmv::ar {

struct DD {
  double hi = 0.0, lo = 0.0;
  double value() const { return hi + lo; }
};

DD two_sum(double a, double b);        // exact: hi + lo == a + b
DD quick_two_sum(double a, double b);  // same, requires |a| >= |b|
DD two_prod(double a, double b);       // exact: hi + lo == a * b
DD dd_add(DD a, double b);
DD dd_add(DD a, DD b);
// Subtract the nearest integer; result in [-1/2, 1/2] up to the low word.
DD dd_reduce_mod1(DD x);

// || twoOmega + n * beta || distance to the nearest integer, exact inputs.
double torus_norm_dd(double twoOmega, double beta, i64 n);

// ---- group points -----------------------------------------------------------

struct GroupSpec {
  int torusDim = 1;
  std::vector<i64> cyclicMods;  // modulus q >= 2 for each finite factor

  size_t cyclicDim() const { return cyclicMods.size(); }
};

struct GroupPoint {
  std::vector<double> torus;
  std::vector<i64> cyclic;
};

// max-metric distance from 2*omega + n*beta to the identity
double group_distance(const GroupSpec& g, const GroupPoint& beta,
                      const GroupPoint& omega, i64 n);

// ---- delta estimator --------------------------------------------------------

struct DeltaResult {
  double delta = 0.0;  // max of -log d / |n| over the scanned range
  bool infinite = false;
  i64 witness = 0;         // signed n achieving the max (or the exact hit)
  double witnessDist = 0.0;
};

// Scan |n| in [nMin, nMax], both signs. An exact hit (distance 0 in the
// group) reports infinite=true with the witness. The estimate is monotone
// nondecreasing in nMax at fixed nMin.
DeltaResult delta_estimate(const GroupSpec& g, const GroupPoint& beta,
                           const GroupPoint& omega, i64 nMax, i64 nMin = 1);

// (sqrt(5) - 1) / 2
double golden_frequency();

// ---- tuned phases -----------------------------------------------------------

// Phase theta for which || 2 theta + m phi || is pinned near
// exp(-1.05 * targetRate * m) at the largest scale m that double-precision
// granularity of theta admits (the distance must stay above ~one ulp of
// 2 theta, which caps targetRate * m around 35). One pinned scale is all a
// double phase can carry: a second independent witness would need distances
// below that granularity. The reported rate is re-measured from the
// constructed theta, so delta_estimate(phi, theta) >= rate is guaranteed.
struct TunedPhase {
  double theta = 0.0;
  double rate = 0.0;  // -log(distance) / witness, measured
  i64 witness = 0;
  double distance = 0.0;
};

TunedPhase liouville_phase(double phi, double targetRate, u64 seed = 1);

}  // namespace cmv::ar
