#include "cmv/sequence.hpp"

#include <cmath>
#include <stdexcept>

namespace cmv {

Cx standard_rho(Cx alpha) {
  double m2 = std::norm(alpha);
  if (m2 >= 1.0)
    throw std::invalid_argument("standard_rho: |alpha| >= 1");
  return Cx(std::sqrt(1.0 - m2), 0.0);
}

Cx complexified_rho(Cx alpha) {
  double m2 = std::norm(alpha);
  if (m2 >= 1.0)
    throw std::invalid_argument("complexified_rho: |alpha| >= 1");
  return Cx(0.0, std::sqrt(1.0 - m2));
}

CoefficientSequence::CoefficientSequence(AlphaFn alpha, RhoConvention conv,
                                         double r0, std::string label)
    : alpha_(std::move(alpha)), conv_(conv), r0_(r0), label_(std::move(label)) {
  if (!alpha_) throw std::invalid_argument("CoefficientSequence: null alpha");
  if (!(r0_ >= 0.0) || r0_ >= 1.0)
    throw std::invalid_argument("CoefficientSequence: need 0 <= r0 < 1, got " +
                                std::to_string(r0_));
}

Cx CoefficientSequence::alpha_raw(i64 n) const {
  Cx a = alpha_(n);
  double m = std::abs(a);
  if (m >= 1.0)
    throw std::invalid_argument("CoefficientSequence(" + label_ +
                                "): |alpha_n| >= 1 at n=" + std::to_string(n));
  // r0 is a declared sup; allow rounding slop but catch real violations.
  if (m > r0_ + 1e-12)
    throw std::invalid_argument("CoefficientSequence(" + label_ +
                                "): |alpha_n| exceeds declared r0 at n=" +
                                std::to_string(n));
  return a;
}

Cx CoefficientSequence::alpha(i64 n) const {
  if (memo_) {
    i64 off = n - memo_->lo;
    if (off >= 0 && off < static_cast<i64>(memo_->alpha.size()))
      return memo_->alpha[static_cast<size_t>(off)];
  }
  return alpha_raw(n);
}

Cx CoefficientSequence::rho(i64 n) const {
  if (memo_) {
    i64 off = n - memo_->lo;
    if (off >= 0 && off < static_cast<i64>(memo_->rho.size()))
      return memo_->rho[static_cast<size_t>(off)];
  }
  Cx a = alpha_raw(n);
  return conv_ == RhoConvention::standard ? standard_rho(a)
                                          : complexified_rho(a);
}

CoefficientSequence CoefficientSequence::materialized(i64 lo, i64 hi) const {
  if (hi < lo)
    throw std::invalid_argument("materialized: window is empty");
  if (hi - lo + 1 > (i64(1) << 28))
    throw ResourceError("materialized: window larger than 2^28 entries");
  CoefficientSequence out = *this;
  auto memo = std::make_shared<Memo>();
  memo->lo = lo;
  size_t n = static_cast<size_t>(hi - lo + 1);
  memo->alpha.reserve(n);
  memo->rho.reserve(n);
  for (i64 k = lo; k <= hi; ++k) {
    Cx a = alpha_raw(k);
    memo->alpha.push_back(a);
    memo->rho.push_back(conv_ == RhoConvention::standard ? standard_rho(a)
                                                         : complexified_rho(a));
  }
  out.memo_ = std::move(memo);
  return out;
}

CoefficientSequence CoefficientSequence::with_convention(
    RhoConvention conv) const {
  CoefficientSequence out(alpha_, conv, r0_, label_);
  return out;  // memo dropped deliberately: rho values differ
}

}  // namespace cmv
