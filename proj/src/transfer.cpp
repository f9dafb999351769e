#include "cmv/transfer.hpp"

#include <cmath>
#include <stdexcept>

namespace cmv::tm {

namespace {
constexpr double kLn2 = 0.6931471805599453094172321214581766;
constexpr double kPropGuard = 1e290;  // raw-sample magnitude cutoff
}  // namespace

Mat2C xmat(Cx a, Cx b, Cx c, Cx ra, Cx rb, Cx rc, Cx w) {
  if (std::abs(ra) < kRhoFloor || std::abs(rb) < kRhoFloor)
    throw NumericError("xmat: rho below floor, step undefined");
  if (std::abs(w) < kRhoFloor)
    throw NumericError("xmat: spectral parameter too close to 0");
  Cx pre = 1.0 / (ra * rb);
  Cx m00 = 1.0 / w + a * std::conj(b) + b * std::conj(c) + a * std::conj(c) * w;
  Cx m01 = -std::conj(rc) * (b + a * w);
  Cx m10 = -ra * (std::conj(b) + std::conj(c) * w);
  Cx m11 = ra * std::conj(rc) * w;
  return {pre * m00, pre * m01, pre * m10, pre * m11};
}

Mat2C transfer_M(const CoefficientSequence& seq, i64 n, Cx z) {
  return xmat(seq.alpha(2 * n), seq.alpha(2 * n - 1), seq.alpha(2 * n - 2),
              seq.rho(2 * n), seq.rho(2 * n - 1), seq.rho(2 * n - 2), z);
}

Mat2C transfer_N(const CoefficientSequence& seq, i64 n, Cx z) {
  if (std::abs(z) < kRhoFloor)
    throw NumericError("transfer_N: spectral parameter too close to 0");
  return xmat(std::conj(seq.alpha(2 * n + 1)), std::conj(seq.alpha(2 * n)),
              std::conj(seq.alpha(2 * n - 1)), seq.rho(2 * n + 1),
              seq.rho(2 * n), seq.rho(2 * n - 1), 1.0 / z);
}

Mat2C transfer_N_inv(const CoefficientSequence& seq, i64 n, Cx z) {
  Cx a0 = seq.alpha(2 * n), a1 = seq.alpha(2 * n + 1), am = seq.alpha(2 * n - 1);
  Cx p0 = seq.rho(2 * n), p1 = seq.rho(2 * n + 1), pm = seq.rho(2 * n - 1);
  if (std::abs(p0) < kRhoFloor || std::abs(pm) < kRhoFloor)
    throw NumericError("transfer_N_inv: rho below floor, step undefined");
  if (std::abs(z) < kRhoFloor)
    throw NumericError("transfer_N_inv: spectral parameter too close to 0");
  Cx w = 1.0 / z;
  Cx pre = 1.0 / (std::conj(p0) * std::conj(pm));
  Cx m00 = std::conj(pm) * p1 * w;
  Cx m01 = std::conj(a0) * std::conj(pm) + std::conj(a1) * std::conj(pm) * w;
  Cx m10 = a0 * p1 + am * p1 * w;
  Cx m11 = z + std::conj(a0) * am + std::conj(a1) * am * w + std::conj(a1) * a0;
  return {pre * m00, pre * m01, pre * m10, pre * m11};
}

Mat2C transfer_N_mirror(const CoefficientSequence& seq, i64 n, Cx z) {
  Mat2C nm = transfer_N(seq, n, z);
  return {nm.d, nm.c, nm.b, nm.a};
}

// ---- ScaledProduct ----------------------------------------------------------

void ScaledProduct::maybe_rescale() {
  double m = mat.max_abs();
  if (!std::isfinite(m) || m == 0.0)
    throw NumericError("ScaledProduct: product left double range");
  if (m > 0x1.0p64 || m < 0x1.0p-64) {
    int e = std::ilogb(m);
    mat = mat.scaled(std::ldexp(1.0, -e));
    twoExp += e;
    ++rescales;
  }
}

void ScaledProduct::absorb_left(const Mat2C& step) {
  mat = step * mat;
  maybe_rescale();
}

void ScaledProduct::absorb_right(const Mat2C& step) {
  mat = mat * step;
  maybe_rescale();
}

double ScaledProduct::log_max_abs() const {
  return std::log(mat.max_abs()) + static_cast<double>(twoExp) * kLn2;
}

double ScaledProduct::log_norm2() const {
  return std::log(mat.norm2()) + static_cast<double>(twoExp) * kLn2;
}

Mat2C ScaledProduct::materialize() const {
  if (twoExp > 1000 || twoExp < -1000)
    throw NumericError("ScaledProduct::materialize: outside double range");
  return mat.scaled(std::ldexp(1.0, static_cast<int>(twoExp)));
}

void ScaledProduct::normalize_final() {
  double m = mat.max_abs();
  if (!std::isfinite(m) || m == 0.0)
    throw NumericError("ScaledProduct: product left double range");
  int e = std::ilogb(m);
  mat = mat.scaled(std::ldexp(1.0, -e));
  twoExp += e;
}

ScaledProduct product_scaled(const CoefficientSequence& seq, StepKind kind,
                             i64 nLo, i64 nHi, Cx z) {
  ScaledProduct p;
  for (i64 n = nLo; n <= nHi; ++n) {
    switch (kind) {
      case StepKind::M:
        p.absorb_left(transfer_M(seq, n, z));
        break;
      case StepKind::N:
        p.absorb_left(transfer_N(seq, n, z));
        break;
      case StepKind::NMirror:
        p.absorb_left(transfer_N_mirror(seq, n, z));
        break;
      case StepKind::NInv:
        p.absorb_right(transfer_N_inv(seq, n, z));
        break;
    }
  }
  return p;
}

// ---- SolutionSlice ----------------------------------------------------------

Cx SolutionSlice::at(i64 k) const {
  if (!covers(k))
    throw std::out_of_range("SolutionSlice::at: site " + std::to_string(k) +
                            " outside [" + std::to_string(siteLo) + ", " +
                            std::to_string(siteHi()) + "]");
  return samples[static_cast<size_t>(k - siteLo)];
}

void SolutionSlice::normalize_window(i64 a, i64 b) {
  if (a > b || !covers(a) || !covers(b))
    throw std::invalid_argument("normalize_window: window not covered");
  double s = 0.0;
  for (i64 k = a; k <= b; ++k) s += std::norm(at(k));
  if (s <= 0.0) throw NumericError("normalize_window: zero solution");
  double inv = 1.0 / std::sqrt(s);
  for (auto& v : samples) v *= inv;
}

std::array<Cx, 2> phi(const SolutionSlice& u, i64 n) {
  return {u.at(2 * n), u.at(2 * n - 1)};
}

SolutionSlice propagate(const CoefficientSequence& seq, Cx z, Cx uEven, Cx uOdd,
                        i64 n0, i64 nLo, i64 nHi) {
  if (nLo > n0 || n0 > nHi)
    throw std::invalid_argument("propagate: anchor outside requested range");
  bool complete = true;

  std::vector<Cx> below;  // u(2n0-2), u(2n0-3), ... descending sites
  {
    std::array<Cx, 2> pair{uEven, uOdd};
    for (i64 n = n0; n > nLo; --n) {
      auto nxt = mat_vec(transfer_N_inv(seq, n - 1, z), pair);
      double mag = std::max(std::abs(nxt[0]), std::abs(nxt[1]));
      if (!std::isfinite(mag) || mag > kPropGuard) {
        complete = false;
        break;
      }
      below.push_back(nxt[0]);
      below.push_back(nxt[1]);
      pair = nxt;
    }
  }

  std::vector<Cx> above;  // u(2n0+1), u(2n0+2), ... ascending sites
  {
    std::array<Cx, 2> pair{uEven, uOdd};
    for (i64 n = n0; n < nHi; ++n) {
      auto nxt = mat_vec(transfer_N(seq, n, z), pair);  // [u(2n+2), u(2n+1)]
      double mag = std::max(std::abs(nxt[0]), std::abs(nxt[1]));
      if (!std::isfinite(mag) || mag > kPropGuard) {
        complete = false;
        break;
      }
      above.push_back(nxt[1]);
      above.push_back(nxt[0]);
      pair = nxt;
    }
  }

  SolutionSlice s;
  s.complete = complete;
  s.siteLo = 2 * n0 - 1 - static_cast<i64>(below.size());
  s.samples.reserve(below.size() + 2 + above.size());
  for (auto it = below.rbegin(); it != below.rend(); ++it)
    s.samples.push_back(*it);
  s.samples.push_back(uOdd);
  s.samples.push_back(uEven);
  for (const auto& v : above) s.samples.push_back(v);
  return s;
}

SolutionSlice propagate_m(const CoefficientSequence& seq, Cx z, Cx uOddTop,
                          Cx uEven, i64 n0, i64 nHi) {
  if (n0 > nHi)
    throw std::invalid_argument("propagate_m: anchor above requested range");
  SolutionSlice s;
  s.siteLo = 2 * n0;
  s.samples.push_back(uEven);
  s.samples.push_back(uOddTop);
  std::array<Cx, 2> pair{uOddTop, uEven};
  for (i64 n = n0 + 1; n <= nHi; ++n) {
    auto nxt = mat_vec(transfer_M(seq, n, z), pair);  // [u(2n+1), u(2n)]
    double mag = std::max(std::abs(nxt[0]), std::abs(nxt[1]));
    if (!std::isfinite(mag) || mag > kPropGuard) {
      s.complete = false;
      break;
    }
    s.samples.push_back(nxt[1]);
    s.samples.push_back(nxt[0]);
    pair = nxt;
  }
  return s;
}

SolutionSlice reflect_slice(const SolutionSlice& u, i64 m) {
  SolutionSlice v;
  v.complete = u.complete;
  v.siteLo = 4 * m - 1 - u.siteHi();
  v.samples.resize(u.samples.size());
  for (size_t i = 0; i < u.samples.size(); ++i)
    v.samples[i] = u.samples[u.samples.size() - 1 - i];
  return v;
}

// ---- Wronskian --------------------------------------------------------------

namespace {

Cx rho_ratio(const CoefficientSequence& seq, i64 k) {
  Cx r = seq.rho(k);
  return r / std::conj(r);
}

Cx cross_term(const SolutionSlice& u, const SolutionSlice& v, i64 n) {
  return u.at(2 * n + 2) * v.at(2 * n + 1) - u.at(2 * n + 1) * v.at(2 * n + 2);
}

}  // namespace

Cx wronskian_at(const CoefficientSequence& seq, const SolutionSlice& u,
                const SolutionSlice& v, i64 n) {
  if (n < 0) throw std::invalid_argument("wronskian_at: n must be >= 0");
  Cx chain(1.0, 0.0);
  for (i64 k = 0; k <= 2 * n; ++k) chain *= rho_ratio(seq, k);
  return seq.rho(2 * n + 1) * chain * cross_term(u, v, n);
}

std::vector<Cx> wronskian_series(const CoefficientSequence& seq,
                                 const SolutionSlice& u,
                                 const SolutionSlice& v, i64 nLo, i64 nHi) {
  if (nLo < 0) throw std::invalid_argument("wronskian_series: nLo must be >= 0");
  if (nHi < nLo) return {};
  Cx chain(1.0, 0.0);
  for (i64 k = 0; k <= 2 * nLo; ++k) chain *= rho_ratio(seq, k);
  std::vector<Cx> out;
  out.reserve(static_cast<size_t>(nHi - nLo + 1));
  for (i64 n = nLo; n <= nHi; ++n) {
    if (n > nLo) chain *= rho_ratio(seq, 2 * n - 1) * rho_ratio(seq, 2 * n);
    out.push_back(seq.rho(2 * n + 1) * chain * cross_term(u, v, n));
  }
  return out;
}

double wronskian_drift(const CoefficientSequence& seq, const SolutionSlice& u,
                       const SolutionSlice& v, i64 nLo, i64 nHi) {
  auto w = wronskian_series(seq, u, v, nLo, nHi);
  double worst = 0.0;
  for (size_t i = 1; i < w.size(); ++i)
    worst = std::max(worst, std::abs(w[i] - w[i - 1]));
  return worst;
}

Cx wronskian_initial(const CoefficientSequence& seq, const SolutionSlice& u,
                     const SolutionSlice& v) {
  return std::conj(seq.rho(-1)) * (u.at(0) * v.at(-1) - u.at(-1) * v.at(0));
}

IdentityReport wronskian_increment_identity(const CoefficientSequence& seq,
                                            Cx z, const SolutionSlice& u,
                                            i64 m, i64 n) {
  if (n < 1)
    throw std::invalid_argument("wronskian_increment_identity: n must be >= 1");
  SolutionSlice v = reflect_slice(u, m);
  auto w = wronskian_series(seq, u, v, n - 1, n);

  i64 M4 = 4 * m;
  Cx a2n = seq.alpha(2 * n), a2nm1 = seq.alpha(2 * n - 1);
  Cx a2np1 = seq.alpha(2 * n + 1);
  Cx p2n = seq.rho(2 * n), p2nm1 = seq.rho(2 * n - 1), p2np1 = seq.rho(2 * n + 1);
  Cx aR1 = seq.alpha(M4 - 2 * n - 1), aR2 = seq.alpha(M4 - 2 * n - 2);
  Cx aR3 = seq.alpha(M4 - 2 * n - 3);
  Cx pR1 = seq.rho(M4 - 2 * n - 1), pR2 = seq.rho(M4 - 2 * n - 2);
  Cx pR3 = seq.rho(M4 - 2 * n - 3);

  Cx u2n = u.at(2 * n), u2np1 = u.at(2 * n + 1);
  Cx v2nm1 = v.at(2 * n - 1), v2n = v.at(2 * n);
  Cx v2np1 = v.at(2 * n + 1), v2np2 = v.at(2 * n + 2);

  Cx t1 = (std::conj(p2n) * a2nm1 + pR2 * std::conj(aR1)) * v2n * u2n;
  Cx t2 = (std::conj(p2n) * std::conj(p2nm1) - pR2 * pR1) * v2nm1 * u2n;
  Cx t3 = (p2n * std::conj(a2np1) + std::conj(pR2) * aR3) * v2np1 * u2np1;
  Cx t4 = (p2np1 * p2n - std::conj(pR2) * std::conj(pR3)) * v2np2 * u2np1;
  Cx t5 = z * (std::norm(aR2) - std::norm(a2n)) * v2np1 * u2n;
  Cx t6 = z * (std::conj(aR2) * pR2 + std::conj(p2n) * a2n) * v2n * u2n;
  Cx t7 = z * (aR2 * std::conj(pR2) + std::conj(a2n) * p2n) * v2np1 * u2np1;
  Cx t8 = z * (std::norm(aR2) - std::norm(a2n)) * v2n * u2np1;

  IdentityReport rep;
  rep.lhs = std::abs(w[1] - w[0]);
  rep.rhs = std::abs(t1 - t2 - t3 - t4 + t5 + t6 - t7 + t8) / std::abs(p2n);
  rep.diff = std::abs(rep.lhs - rep.rhs);
  return rep;
}

ReflectedDrift reflected_drift(const CoefficientSequence& seq, Cx z, i64 m,
                               Cx uEven, Cx uOdd, bool normalize) {
  if (m < 2)
    throw std::invalid_argument("reflected_drift: need m >= 2 for a window");
  ReflectedDrift out;
  out.m = m;
  out.u = propagate(seq, z, uEven, uOdd, m, 0, 2 * m);
  if (!out.u.complete)
    throw NumericError("reflected_drift: propagation left double range");
  if (normalize) out.u.normalize_window(0, 4 * m);
  SolutionSlice v = reflect_slice(out.u, m);
  auto w = wronskian_series(seq, out.u, v, 0, 2 * m - 2);
  out.increments.reserve(w.size() - 1);
  for (size_t i = 0; i < w.size(); ++i) {
    out.l1 += std::abs(w[i]);
    if (i > 0) {
      double inc = std::abs(w[i] - w[i - 1]);
      out.increments.push_back(inc);
      out.maxIncrement = std::max(out.maxIncrement, inc);
    }
  }
  return out;
}

ReflectionSplit reflection_split(const SolutionSlice& u, i64 m) {
  SolutionSlice v = reflect_slice(u, m);
  i64 lo = std::max(u.siteLo, v.siteLo);
  i64 hi = std::min(u.siteHi(), v.siteHi());
  if (lo > hi || !(lo <= 2 * m - 1 && 2 * m <= hi))
    throw std::invalid_argument(
        "reflection_split: slice does not cover the reflection center");
  ReflectionSplit out;
  out.plus.siteLo = out.minus.siteLo = lo;
  out.plus.complete = out.minus.complete = u.complete;
  out.plus.samples.reserve(static_cast<size_t>(hi - lo + 1));
  out.minus.samples.reserve(static_cast<size_t>(hi - lo + 1));
  for (i64 k = lo; k <= hi; ++k) {
    out.plus.samples.push_back(u.at(k) + v.at(k));
    out.minus.samples.push_back(u.at(k) - v.at(k));
  }
  auto pp = phi(out.plus, m);
  auto pm = phi(out.minus, m);
  out.phiNormPlus = std::sqrt(std::norm(pp[0]) + std::norm(pp[1]));
  out.phiNormMinus = std::sqrt(std::norm(pm[0]) + std::norm(pm[1]));
  out.smallSign = out.phiNormPlus <= out.phiNormMinus ? +1 : -1;
  return out;
}

}  // namespace cmv::tm
