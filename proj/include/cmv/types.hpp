// Core scalar/matrix types shared across the toolkit.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace cmv {

using Cx = std::complex<double>;
using i64 = std::int64_t;
using u64 = std::uint64_t;

inline constexpr double kRhoFloor = 1e-12;   // hard error below this |rho|
inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Numeric failures that indicate the computation left its validity domain
// (vanishing rho, scale budget exhausted), as opposed to bad user input.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Requests that exceed a hard resource cap (window too large, word too deep).
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---- 2x2 complex matrix ----------------------------------------------------

struct Mat2C {
  Cx a{}, b{},   // [a b]
     c{}, d{};   // [c d]

  static Mat2C identity() { return {1.0, 0.0, 0.0, 1.0}; }

  Mat2C operator*(const Mat2C& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d,
            c * o.a + d * o.c, c * o.b + d * o.d};
  }
  Mat2C operator-(const Mat2C& o) const {
    return {a - o.a, b - o.b, c - o.c, d - o.d};
  }
  Mat2C operator+(const Mat2C& o) const {
    return {a + o.a, b + o.b, c + o.c, d + o.d};
  }
  Mat2C scaled(double s) const { return {a * s, b * s, c * s, d * s}; }

  Cx det() const { return a * d - b * c; }

  Mat2C adjugate() const { return {d, -b, -c, a}; }

  Mat2C inverse() const {
    Cx dt = det();
    if (std::abs(dt) < 1e-300)
      throw NumericError("Mat2C::inverse: determinant underflow");
    Cx s = 1.0 / dt;
    return {d * s, -b * s, -c * s, a * s};
  }

  double max_abs() const {
    return std::max(std::max(std::abs(a), std::abs(b)),
                    std::max(std::abs(c), std::abs(d)));
  }

  double frob() const {
    return std::sqrt(std::norm(a) + std::norm(b) + std::norm(c) + std::norm(d));
  }

  // Operator 2-norm (largest singular value), closed form for 2x2.
  double norm2() const {
    double s = std::norm(a) + std::norm(b) + std::norm(c) + std::norm(d);
    double dd = std::abs(det());
    double disc = s * s - 4.0 * dd * dd;
    if (disc < 0.0) disc = 0.0;
    return std::sqrt(0.5 * (s + std::sqrt(disc)));
  }
};

inline Mat2C sigma_swap() { return {0.0, 1.0, 1.0, 0.0}; }  // antidiagonal flip

inline double max_abs_diff(const Mat2C& x, const Mat2C& y) {
  return (x - y).max_abs();
}

// ---- deterministic index-addressable PRNG ----------------------------------
//
// splitmix64: used so that "random" coefficient sequences stay pure functions
// of the index (same value no matter the evaluation order or thread).

inline u64 splitmix64(u64 x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline double unit_double(u64 bits) {  // [0,1)
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Stateful convenience wrapper for test/driver draws.
struct Rng {
  u64 state;
  explicit Rng(u64 seed) : state(splitmix64(seed ^ 0x5bf03635ebc7a399ULL)) {}
  u64 next() { return state = splitmix64(state); }
  double uniform() { return unit_double(next()); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // uniform on the closed disk of the given radius
  Cx disk(double radius) {
    double r = radius * std::sqrt(uniform());
    double ph = 2.0 * kPi * uniform();
    return Cx(r * std::cos(ph), r * std::sin(ph));
  }
  Cx unit_circle() {
    double ph = 2.0 * kPi * uniform();
    return Cx(std::cos(ph), std::sin(ph));
  }
};

}  // namespace cmv
