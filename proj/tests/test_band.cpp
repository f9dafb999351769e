#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "cmv/band.hpp"
#include "cmv/linalg.hpp"
#include "cmv/models.hpp"
#include "cmv/transfer.hpp"

using namespace cmv;
using namespace cmv::op;

namespace {

using Dense = std::vector<std::vector<Cx>>;

Dense dense_zero(size_t n) { return Dense(n, std::vector<Cx>(n, Cx(0, 0))); }

// Independent oracle for the five-diagonal matrix: multiply the two 2x2
// block layers as explicit dense matrices over sites [0, 2K).
//   even layer: Theta(alpha_{2n}) acting on {2n, 2n+1}
//   odd layer:  Theta(alpha_{2n+1}) acting on {2n+1, 2n+2}, identity at the
//               two uncovered corners
Dense dense_two_layer(const CoefficientSequence& seq, size_t K) {
  size_t N = 2 * K;
  Dense L = dense_zero(N), M = dense_zero(N);
  for (size_t n = 0; n < K; ++n) {
    Cx a = seq.alpha(static_cast<i64>(2 * n));
    Cx p = seq.rho(static_cast<i64>(2 * n));
    L[2 * n][2 * n] = std::conj(a);
    L[2 * n][2 * n + 1] = p;
    L[2 * n + 1][2 * n] = std::conj(p);
    L[2 * n + 1][2 * n + 1] = -a;
  }
  M[0][0] = Cx(1, 0);
  M[N - 1][N - 1] = Cx(1, 0);
  for (size_t n = 0; n + 1 < K; ++n) {
    Cx a = seq.alpha(static_cast<i64>(2 * n + 1));
    Cx p = seq.rho(static_cast<i64>(2 * n + 1));
    M[2 * n + 1][2 * n + 1] = std::conj(a);
    M[2 * n + 1][2 * n + 2] = p;
    M[2 * n + 2][2 * n + 1] = std::conj(p);
    M[2 * n + 2][2 * n + 2] = -a;
  }
  Dense E = dense_zero(N);
  for (size_t r = 0; r < N; ++r)
    for (size_t k = 0; k < N; ++k) {
      if (L[r][k] == Cx(0, 0)) continue;
      for (size_t c = 0; c < N; ++c) E[r][c] += L[r][k] * M[k][c];
    }
  return E;
}

CoefficientSequence rotated(const CoefficientSequence& seq, Cx omega) {
  CoefficientSequence base = seq;
  return CoefficientSequence([base, omega](i64 n) { return omega * base.alpha(n); },
                             seq.convention(), seq.r0(), "rotated");
}

}  // namespace

TEST_CASE("theta blocks are unitary and reject inconsistent pairs") {
  Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    Cx a = rng.disk(0.95);
    Cx p = std::sqrt(1.0 - std::norm(a)) * rng.unit_circle();
    Mat2C th = theta_block(a, p);
    CHECK(th.a == std::conj(a));
    CHECK(th.b == p);
    CHECK(th.c == std::conj(p));
    CHECK(th.d == -a);
    // unitarity: Theta Theta^* = I
    Mat2C prod = th * Mat2C{std::conj(th.a), std::conj(th.c),
                            std::conj(th.b), std::conj(th.d)};
    CHECK(max_abs_diff(prod, Mat2C::identity()) <= 1e-15);
  }
  CHECK_THROWS_AS(theta_block(Cx(0.8, 0), Cx(0.8, 0)), std::invalid_argument);
}

TEST_CASE("band entries match the dense two-layer oracle") {
  for (auto conv : {RhoConvention::standard, RhoConvention::complexified}) {
    auto seq = models::random_sequence(0.7, 42, conv);
    size_t K = 16;
    Dense E = dense_two_layer(seq, K);
    GECMVBand band = build_gecmv(seq, 0, 2 * static_cast<i64>(K) - 1);
    // rows 2..2K-3 are unaffected by the dense oracle's open boundary
    for (i64 r = 2; r <= 2 * static_cast<i64>(K) - 4; ++r)
      for (i64 c = 0; c < 2 * static_cast<i64>(K); ++c) {
        Cx expect = E[static_cast<size_t>(r)][static_cast<size_t>(c)];
        CHECK(std::abs(band.at(r, c) - expect) <= 1e-15);
      }
  }
}

TEST_CASE("band rows and columns have unit l2 norm") {
  auto seq = models::random_sequence(0.8, 7, RhoConvention::complexified);
  GECMVBand band = build_gecmv(seq, -41, 40);
  for (i64 r = -41; r <= 40; ++r) {
    double s = 0.0;
    for (i64 c = GECMVBand::col_start(r); c < GECMVBand::col_start(r) + 4; ++c)
      s += std::norm(band.at(r, c));
    CHECK(std::abs(s - 1.0) <= 1e-14);
  }
  // column c receives entries from rows c-2 .. c+2 inside the stencil
  for (i64 c = -38; c <= 37; ++c) {
    double s = 0.0;
    for (i64 r = c - 2; r <= c + 2; ++r) s += std::norm(band.at(r, c));
    CHECK(std::abs(s - 1.0) <= 1e-14);
  }
}

TEST_CASE("coordinate formulas agree with the band matvec") {
  for (auto conv : {RhoConvention::standard, RhoConvention::complexified}) {
    auto seq = models::random_sequence(0.75, 99, conv);
    i64 lo = -20, hi = 21;
    GECMVBand band = build_gecmv(seq, lo, hi);

    Rng rng(5);
    i64 uStart = lo - 2;
    std::vector<Cx> u;
    for (i64 k = uStart; k <= hi + 2; ++k) u.push_back(rng.disk(1.0));

    auto mv = band_matvec(band, u, uStart);
    for (i64 n = lo; n <= hi; ++n) {
      Cx direct = apply_at(seq, u, uStart, n);
      CHECK(std::abs(direct - mv[static_cast<size_t>(n - lo)]) <= 1e-14);
    }
  }
}

TEST_CASE("band equals the blockwise layer product on a 1000-site window") {
  auto seq = models::random_sequence(0.85, 321, RhoConvention::complexified);
  CHECK(lm_check(seq, -500, 499) <= 1e-14);
  auto uamo = models::uamo_sequence({0.6, 0.9, 0.61803398874989485, 0.3});
  CHECK(lm_check(uamo, 0, 999) <= 1e-14);
}

TEST_CASE("propagated solutions satisfy the eigenvalue equation of the band") {
  auto seq = models::random_sequence(0.5, 1234, RhoConvention::complexified);
  Rng rng(8);
  Cx z = rng.unit_circle();
  tm::SolutionSlice u = tm::propagate(seq, z, Cx(0.7, 0.2), Cx(-0.4, 0.5), 0, -15, 15);
  REQUIRE(u.complete);

  // layer relations, max over the covered pair range
  CHECK(layer_eig_residual(seq, z, u.samples, u.siteLo, -14, 13) <= 1e-10);

  // full coordinate action: [E u](n) = z u(n) away from the slice edges
  for (i64 n = u.siteLo + 2; n <= u.siteHi() - 2; ++n) {
    Cx lhs = apply_at(seq, u.samples, u.siteLo, n);
    CHECK(std::abs(lhs - z * u.at(n)) <= 1e-10 * std::abs(u.at(n)) + 1e-12);
  }
}

TEST_CASE("truncations are unitary and match the band in the interior") {
  auto seq = models::random_sequence(0.8, 2718, RhoConvention::standard);
  i64 a = -8, b = 39;
  TruncatedUnitary t = truncate_unitary(seq, a, b);
  i64 N = b - a + 1;
  REQUIRE(t.u.rows == N);
  CHECK(!t.boundary.empty());

  DenseC gram = t.u.adjoint().mul(t.u);
  CHECK(gram.max_abs_diff(DenseC::identity(N)) <= 1e-12);

  GECMVBand band = build_gecmv(seq, a, b);
  for (i64 r = a + 2; r <= b - 2; ++r)
    for (i64 c = a; c <= b; ++c)
      CHECK(std::abs(t.u.at(r - a, c - a) - band.at(r, c)) <= 1e-15);

  CHECK_THROWS_AS(truncate_unitary(seq, 1, 9), std::invalid_argument);
  CHECK_THROWS_AS(truncate_unitary(seq, 0, 10), std::invalid_argument);
  CHECK_THROWS_AS(truncate_unitary(seq, 0, 8191), ResourceError);
}

TEST_CASE("free truncation: eigenvalues are the N-th roots of -1, IPR = 1/N") {
  auto freeSeq = models::constant_sequence(Cx(0, 0));
  i64 N = 64;
  TruncatedUnitary t = truncate_unitary(freeSeq, 0, N - 1);

  EigResult eig = unitary_band_eig(t.u, 2, 2);
  REQUIRE(static_cast<i64>(eig.values.size()) == N);
  CHECK(eig.max_residual <= 1e-7);

  std::vector<double> got, expect;
  for (Cx v : eig.values) {
    CHECK(std::abs(std::abs(v) - 1.0) <= 1e-10);
    got.push_back(std::arg(v));
  }
  for (i64 k = 0; k < N; ++k) {
    double ph = kPi * (2.0 * static_cast<double>(k) + 1.0) / static_cast<double>(N);
    expect.push_back(std::arg(std::polar(1.0, ph)));
  }
  std::sort(got.begin(), got.end());
  std::sort(expect.begin(), expect.end());
  for (i64 k = 0; k < N; ++k)
    CHECK(std::abs(got[static_cast<size_t>(k)] - expect[static_cast<size_t>(k)]) <= 1e-10);

  // the eigenvectors of the cyclic shift are flat, so every IPR is exactly 1/N
  for (i64 j = 0; j < N; ++j) {
    double ipr = 0.0;
    for (i64 k = 0; k < N; ++k) ipr += std::pow(std::abs(eig.vectors.at(k, j)), 4);
    CHECK(std::abs(ipr - 1.0 / static_cast<double>(N)) <= 1e-10);
  }
}

TEST_CASE("banded eigensolve agrees with the dense solver") {
  auto seq = models::uamo_sequence({0.45, 0.8, 0.61803398874989485, 0.12});
  TruncatedUnitary t = truncate_unitary(seq, 0, 63);
  EigResult banded = unitary_band_eig(t.u, 2, 2);
  EigResult dense = dense_eig(t.u);
  REQUIRE(banded.values.size() == dense.values.size());
  CHECK(dense.max_residual <= 1e-10);

  // greedy nearest matching; sorted phases would split a multiple eigenvalue
  // at -1 across the arg branch cut
  std::vector<bool> used(dense.values.size(), false);
  for (Cx v : banded.values) {
    double best = 1e300;
    size_t arg = 0;
    for (size_t j = 0; j < dense.values.size(); ++j) {
      if (used[j]) continue;
      double d = std::abs(v - dense.values[j]);
      if (d < best) { best = d; arg = j; }
    }
    used[arg] = true;
    CHECK(best <= 1e-8);
  }
}

TEST_CASE("free band has pure shift entries") {
  auto freeSeq = models::constant_sequence(Cx(0, 0));
  GECMVBand band = build_gecmv(freeSeq, -10, 9);
  for (i64 n = -4; n <= 4; ++n) {
    CHECK(band.at(2 * n, 2 * n + 2) == Cx(1, 0));
    CHECK(band.at(2 * n + 1, 2 * n - 1) == Cx(1, 0));
    CHECK(std::abs(band.at(2 * n, 2 * n - 1)) == 0.0);
    CHECK(std::abs(band.at(2 * n, 2 * n)) == 0.0);
    CHECK(std::abs(band.at(2 * n, 2 * n + 1)) == 0.0);
    CHECK(std::abs(band.at(2 * n + 1, 2 * n)) == 0.0);
    CHECK(std::abs(band.at(2 * n + 1, 2 * n + 1)) == 0.0);
    CHECK(std::abs(band.at(2 * n + 1, 2 * n + 2)) == 0.0);
  }
}

TEST_CASE("matvec rejects vectors that do not cover the stencil") {
  auto seq = models::random_sequence(0.5, 3);
  GECMVBand band = build_gecmv(seq, 0, 9);
  std::vector<Cx> tooShort(10, Cx(1, 0));
  CHECK_THROWS_AS((void)band_matvec(band, tooShort, 0), std::invalid_argument);
}

TEST_CASE("diagonal gauge search certifies known-equivalent pairs") {
  auto seq = models::random_sequence(0.7, 55, RhoConvention::standard);

  // a sequence is its own gauge transform with constant phases
  GaugeResult same = find_diagonal_gauge(seq, seq, -10, 9);
  CHECK(same.residual <= 1e-13);
  for (Cx l : same.phases) CHECK(std::abs(l - same.phases.front()) <= 1e-12);

  // rotating every coefficient by omega is the diagonal gauge that puts
  // conj(omega) on odd sites relative to even ones
  Cx omega = std::polar(1.0, 0.77);
  GaugeResult rot = find_diagonal_gauge(seq, rotated(seq, omega), -10, 9);
  CHECK(rot.residual <= 1e-12);
  for (size_t k = 0; k + 1 < rot.phases.size(); k += 2)
    CHECK(std::abs(rot.phases[k + 1] - omega * rot.phases[k]) <= 1e-10);

  // unrelated sequences are not gauge-equivalent and the residual says so
  GaugeResult bad =
      find_diagonal_gauge(seq, models::random_sequence(0.7, 56), -10, 9);
  CHECK(bad.residual > 0.05);
}
