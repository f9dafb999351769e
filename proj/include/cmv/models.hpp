// Concrete coefficient-sequence families: the unitary almost Mathieu family
// (split-step quantum walk coefficients), its mosaic sparsification, subshift
// codings (periodic words and the two-sided Thue-Morse fixed point), plus
// helpers used by tests and the CLI (random, constant, periodic custom).
#pragma once

#include <map>
#include <string>
#include <vector>

#include "cmv/sequence.hpp"

namespace cmv::models {

// ---- quasi-periodic families ------------------------------------------------

struct UamoParams {
  double lambda1 = 0.5;  // even-site coupling; alpha_{2n} = sqrt(1 - lambda1^2)
  double lambda2 = 0.5;  // odd-site modulation depth
  double phi = 0.0;      // frequency, reduced mod 1 at construction
  double theta = 0.0;    // phase, reduced mod 1 at construction
};

// alpha_{2n-1} = lambda2 * cos(2*pi*(n*phi + theta)), alpha_{2n} = lambda1'.
CoefficientSequence uamo_sequence(const UamoParams& p,
                                  RhoConvention conv = RhoConvention::standard);

struct MosaicParams {
  double lambda1 = 0.5;
  double lambda2 = 0.5;
  double phi = 0.0;
  double theta = 0.0;
  i64 s = 1;  // sparsity period; s=1 reproduces the uamo family exactly
};

// Odd index 2j-1 carries lambda2*cos(2*pi*((j/s)*phi + theta)) when s | j and
// 0 otherwise; even indices carry lambda1' as in the uamo family.
CoefficientSequence mosaic_sequence(const MosaicParams& p,
                                    RhoConvention conv = RhoConvention::standard);

// ---- subshift codings --------------------------------------------------------

struct SubshiftWord {
  std::string symbols;            // finite word over a small alphabet
  std::map<char, Cx> coding;      // letter -> alpha value, all |value| < 1
};

enum class RepeatMode {
  periodic,                 // two-sided periodic extension of `symbols`
  substitution_fixed_point  // two-sided Thue-Morse fixed point (ba.ab seed)
};

CoefficientSequence subshift_sequence(const SubshiftWord& word, RepeatMode mode,
                                      RhoConvention conv = RhoConvention::standard);

// k-fold image of "a" under a -> ab, b -> ba. Length 2^k; k <= 26.
std::string thue_morse_word(int k);

// Letter of the two-sided Thue-Morse fixed point at index n. For n >= 0 this
// is the usual one-sided fixed point (popcount parity); negative indices
// mirror it, omega(-n-1) = omega(n), which is the ...ba.ab... seed.
char thue_morse_letter(i64 n);

struct PalindromeHit {
  std::string text;
  i64 pos;  // first occurrence (0-based) in the scanned word
};

// All distinct palindromic factors of `word` with length in [1, maxLen],
// sorted by (length, text), each with its first position.
std::vector<PalindromeHit> palindrome_scan(const std::string& word, int maxLen);

// ---- generic constructions ---------------------------------------------------

// Reflection-symmetric extension about 0: beta_n = alpha_n for n > 0,
// beta_{-n} = conj(alpha_n), beta_0 = Re(alpha_0). Satisfies
// beta_{-n} == conj(beta_n) bit-exactly for every n.
CoefficientSequence symmetrize(const CoefficientSequence& seq);

// Same idea about an arbitrary center zeta = twoZeta / 2 (half-integers
// allowed): the side 2n < twoZeta is kept, the other side mirrors it as
// beta_{2 zeta - n} = conj(beta_n), and an integral center is realified.
CoefficientSequence symmetrize_about(const CoefficientSequence& seq,
                                     i64 twoZeta);

// i.i.d.-style draws from the closed disk of radius rCap, addressed purely by
// index through a seeded hash (deterministic, order-independent).
CoefficientSequence random_sequence(double rCap, u64 seed,
                                    RhoConvention conv = RhoConvention::standard);

CoefficientSequence constant_sequence(Cx alpha,
                                      RhoConvention conv = RhoConvention::standard);

// Two-sided periodic extension of an explicit coefficient list.
CoefficientSequence custom_sequence(std::vector<Cx> alphas,
                                    RhoConvention conv = RhoConvention::standard);

// x reduced to [0, 1)
double mod1(double x);

}  // namespace cmv::models
