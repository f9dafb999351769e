#include "cmv/models.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace cmv::models {

double mod1(double x) {
  double r = x - std::floor(x);
  return (r >= 1.0) ? 0.0 : r;  // guard the x = -tiny rounding case
}

static void check_unit_interval(double v, const char* name) {
  if (!(v > 0.0) || !(v < 1.0))
    throw std::invalid_argument(std::string(name) + " must lie in (0,1)");
}

CoefficientSequence uamo_sequence(const UamoParams& p, RhoConvention conv) {
  check_unit_interval(p.lambda1, "lambda1");
  check_unit_interval(p.lambda2, "lambda2");
  double phi = mod1(p.phi);
  double theta = mod1(p.theta);
  double l1p = std::sqrt(1.0 - p.lambda1 * p.lambda1);
  double l2 = p.lambda2;
  auto alpha = [phi, theta, l1p, l2](i64 k) -> Cx {
    if ((k & 1) == 0) return Cx(l1p, 0.0);
    i64 n = (k + 1) / 2;  // k = 2n - 1
    return Cx(l2 * std::cos(2.0 * kPi * (static_cast<double>(n) * phi + theta)),
              0.0);
  };
  double r0 = std::max(l1p, l2);
  return CoefficientSequence(alpha, conv, r0, "uamo");
}

CoefficientSequence mosaic_sequence(const MosaicParams& p, RhoConvention conv) {
  check_unit_interval(p.lambda1, "lambda1");
  check_unit_interval(p.lambda2, "lambda2");
  if (p.s < 1) throw std::invalid_argument("mosaic: s must be >= 1");
  double phi = mod1(p.phi);
  double theta = mod1(p.theta);
  double l1p = std::sqrt(1.0 - p.lambda1 * p.lambda1);
  double l2 = p.lambda2;
  i64 s = p.s;
  auto alpha = [phi, theta, l1p, l2, s](i64 k) -> Cx {
    if ((k & 1) == 0) return Cx(l1p, 0.0);
    i64 j = (k + 1) / 2;  // k = 2j - 1
    if (j % s != 0) return Cx(0.0, 0.0);
    i64 n = j / s;
    return Cx(l2 * std::cos(2.0 * kPi * (static_cast<double>(n) * phi + theta)),
              0.0);
  };
  double r0 = std::max(l1p, l2);
  return CoefficientSequence(alpha, conv, r0, "mosaic");
}

// ---- subshifts ----------------------------------------------------------------

std::string thue_morse_word(int k) {
  if (k < 0) throw std::invalid_argument("thue_morse_word: k < 0");
  if (k > 26) throw ResourceError("thue_morse_word: k > 26 refused");
  std::string w = "a";
  for (int i = 0; i < k; ++i) {
    std::string next;
    next.reserve(w.size() * 2);
    for (char c : w) next += (c == 'a') ? "ab" : "ba";
    w = std::move(next);
  }
  return w;
}

char thue_morse_letter(i64 n) {
  u64 m = (n >= 0) ? static_cast<u64>(n) : static_cast<u64>(-n - 1);
  int parity = __builtin_popcountll(m) & 1;
  return parity ? 'b' : 'a';
}

CoefficientSequence subshift_sequence(const SubshiftWord& word, RepeatMode mode,
                                      RhoConvention conv) {
  if (mode == RepeatMode::periodic && word.symbols.empty())
    throw std::invalid_argument("subshift_sequence: empty word");
  double r0 = 0.0;
  for (char c : word.symbols) {
    auto it = word.coding.find(c);
    if (it == word.coding.end())
      throw std::invalid_argument(std::string("subshift_sequence: letter '") +
                                  c + "' has no coding");
    r0 = std::max(r0, std::abs(it->second));
  }
  if (mode == RepeatMode::substitution_fixed_point) {
    // Only the two fixed-point letters are read; `symbols` may stay empty.
    for (char c : {'a', 'b'}) {
      auto it = word.coding.find(c);
      if (it == word.coding.end())
        throw std::invalid_argument(
            "subshift_sequence: substitution mode needs codings for 'a','b'");
      r0 = std::max(r0, std::abs(it->second));
    }
  }
  if (r0 >= 1.0)
    throw std::invalid_argument("subshift_sequence: coding modulus >= 1");

  if (mode == RepeatMode::periodic) {
    std::vector<Cx> values;
    values.reserve(word.symbols.size());
    for (char c : word.symbols) values.push_back(word.coding.at(c));
    i64 len = static_cast<i64>(values.size());
    auto alpha = [values, len](i64 n) -> Cx {
      i64 r = n % len;
      if (r < 0) r += len;
      return values[static_cast<size_t>(r)];
    };
    return CoefficientSequence(alpha, conv, r0, "subshift-periodic");
  }

  Cx ca = word.coding.at('a');
  Cx cb = word.coding.at('b');
  auto alpha = [ca, cb](i64 n) -> Cx {
    return thue_morse_letter(n) == 'a' ? ca : cb;
  };
  return CoefficientSequence(alpha, conv, r0, "subshift-thue-morse");
}

std::vector<PalindromeHit> palindrome_scan(const std::string& word, int maxLen) {
  if (maxLen < 1) throw std::invalid_argument("palindrome_scan: maxLen < 1");
  i64 n = static_cast<i64>(word.size());
  std::map<std::string, i64> first;
  // Classic center expansion, bounded by maxLen.
  auto record = [&](i64 lo, i64 len) {
    std::string s = word.substr(static_cast<size_t>(lo), static_cast<size_t>(len));
    auto it = first.find(s);
    if (it == first.end() || lo < it->second) first[s] = lo;
  };
  for (i64 c = 0; c < n; ++c) {
    // odd length, center c
    for (i64 r = 0; c - r >= 0 && c + r < n && 2 * r + 1 <= maxLen; ++r) {
      if (word[static_cast<size_t>(c - r)] != word[static_cast<size_t>(c + r)])
        break;
      record(c - r, 2 * r + 1);
    }
    // even length, centers c, c+1
    for (i64 r = 1; c - r + 1 >= 0 && c + r < n && 2 * r <= maxLen; ++r) {
      if (word[static_cast<size_t>(c - r + 1)] !=
          word[static_cast<size_t>(c + r)])
        break;
      record(c - r + 1, 2 * r);
    }
  }
  std::vector<PalindromeHit> out;
  out.reserve(first.size());
  for (auto& [text, pos] : first) out.push_back({text, pos});
  std::sort(out.begin(), out.end(), [](const PalindromeHit& x,
                                       const PalindromeHit& y) {
    if (x.text.size() != y.text.size()) return x.text.size() < y.text.size();
    return x.text < y.text;
  });
  return out;
}

// ---- generic constructions -----------------------------------------------------

CoefficientSequence symmetrize(const CoefficientSequence& seq) {
  CoefficientSequence base = seq;  // capture by value keeps the memo alive
  auto alpha = [base](i64 n) -> Cx {
    if (n > 0) return base.alpha(n);
    if (n == 0) return Cx(base.alpha(0).real(), 0.0);
    return std::conj(base.alpha(-n));
  };
  return CoefficientSequence(alpha, seq.convention(), seq.r0(),
                             "sym(" + seq.label() + ")");
}

CoefficientSequence symmetrize_about(const CoefficientSequence& seq,
                                     i64 twoZeta) {
  CoefficientSequence base = seq;
  auto alpha = [base, twoZeta](i64 n) -> Cx {
    i64 mirrored = twoZeta - n;
    if (2 * n < twoZeta) return base.alpha(n);
    if (2 * n == twoZeta) return Cx(base.alpha(n).real(), 0.0);
    return std::conj(base.alpha(mirrored));
  };
  return CoefficientSequence(alpha, seq.convention(), seq.r0(),
                             "sym@" + std::to_string(twoZeta) + "/2(" +
                                 seq.label() + ")");
}

CoefficientSequence random_sequence(double rCap, u64 seed, RhoConvention conv) {
  if (!(rCap >= 0.0) || rCap >= 1.0)
    throw std::invalid_argument("random_sequence: need 0 <= rCap < 1");
  auto alpha = [rCap, seed](i64 n) -> Cx {
    u64 h = splitmix64(seed ^ splitmix64(static_cast<u64>(n) +
                                         0x6a09e667f3bcc908ULL));
    u64 h2 = splitmix64(h);
    double r = rCap * std::sqrt(unit_double(h));
    double ph = 2.0 * kPi * unit_double(h2);
    return Cx(r * std::cos(ph), r * std::sin(ph));
  };
  return CoefficientSequence(alpha, conv, rCap,
                             "random(r=" + std::to_string(rCap) + ")");
}

CoefficientSequence constant_sequence(Cx a, RhoConvention conv) {
  if (std::abs(a) >= 1.0)
    throw std::invalid_argument("constant_sequence: |alpha| >= 1");
  return CoefficientSequence([a](i64) { return a; }, conv, std::abs(a),
                             "constant");
}

CoefficientSequence custom_sequence(std::vector<Cx> alphas, RhoConvention conv) {
  if (alphas.empty())
    throw std::invalid_argument("custom_sequence: empty coefficient list");
  double r0 = 0.0;
  for (Cx a : alphas) r0 = std::max(r0, std::abs(a));
  if (r0 >= 1.0)
    throw std::invalid_argument("custom_sequence: coefficient modulus >= 1");
  i64 len = static_cast<i64>(alphas.size());
  auto alpha = [alphas = std::move(alphas), len](i64 n) -> Cx {
    i64 r = n % len;
    if (r < 0) r += len;
    return alphas[static_cast<size_t>(r)];
  };
  return CoefficientSequence(alpha, conv, r0, "custom-periodic");
}

}  // namespace cmv::models
