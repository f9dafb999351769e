// Verblunsky coefficient sequences.
//
// A sequence hands out pairs (alpha_n, rho_n) indexed over all of Z, with
// |alpha_n|^2 + |rho_n|^2 = 1 and sup_n |alpha_n| = r0 < 1. Values are pure
// functions of the index; an optional materialized window memoizes them for
// hot loops without changing semantics.
#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "cmv/types.hpp"

namespace cmv {

enum class RhoConvention { standard, complexified };

// rho = sqrt(1 - |alpha|^2), the usual positive choice.
Cx standard_rho(Cx alpha);
// rho = i * sqrt(1 - |alpha|^2); purely imaginary, conj(rho) = -rho. This is
// the gauge used by the reflection arguments (it makes rho odd under
// conjugation, matching the alpha -> conj(alpha) mirror rule).
Cx complexified_rho(Cx alpha);

class CoefficientSequence {
 public:
  using AlphaFn = std::function<Cx(i64)>;

  CoefficientSequence() = default;
  CoefficientSequence(AlphaFn alpha, RhoConvention conv, double r0,
                      std::string label);

  // alpha_n; throws std::invalid_argument if the produced value has modulus
  // >= 1 (the operator is not defined there) or exceeds the declared r0
  // beyond rounding.
  Cx alpha(i64 n) const;
  // rho_n under the sequence's convention.
  Cx rho(i64 n) const;

  RhoConvention convention() const { return conv_; }
  double r0() const { return r0_; }
  const std::string& label() const { return label_; }

  // Copy whose values over [lo, hi] are precomputed. Outside the window the
  // copy falls back to the pure function. Evaluation is unchanged, only
  // faster; the memo is immutable and safe to share across threads.
  CoefficientSequence materialized(i64 lo, i64 hi) const;
  bool has_memo() const { return memo_ != nullptr; }

  // Sequence with the same alpha but the other rho convention.
  CoefficientSequence with_convention(RhoConvention conv) const;

 private:
  struct Memo {
    i64 lo = 0;
    std::vector<Cx> alpha, rho;
  };

  Cx alpha_raw(i64 n) const;

  AlphaFn alpha_;
  RhoConvention conv_ = RhoConvention::standard;
  double r0_ = 0.0;
  std::string label_;
  std::shared_ptr<const Memo> memo_;
};

}  // namespace cmv
