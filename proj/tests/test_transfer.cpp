#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "cmv/models.hpp"
#include "cmv/sequence.hpp"
#include "cmv/transfer.hpp"
#include "cmv/types.hpp"

using namespace cmv;
using tm::SolutionSlice;
using tm::StepKind;

namespace {

double max_diff(const Mat2C& x, const Mat2C& y) { return (x - y).max_abs(); }

double rel_diff(const Mat2C& x, const Mat2C& y) {
  return max_diff(x, y) / std::max(1.0, std::max(x.max_abs(), y.max_abs()));
}

Cx off_circle_z(Rng& rng) {
  return rng.unit_circle() * std::exp(rng.uniform(-0.3, 0.3));
}

// Step through the generalized eigenvalue equation directly: the two band
// rows of block n form a 2x2 system for (u(2n+1), u(2n+2)) once u(2n-1) and
// u(2n) are known. Completely independent of the closed-form transfer
// matrices, so it pins their entries to the operator.
struct BandRecursion {
  const CoefficientSequence& seq;
  Cx z;

  std::array<Cx, 2> advance(i64 n, Cx uPrevOdd, Cx uEven) const {
    const Cx a2n = seq.alpha(2 * n), a2n1 = seq.alpha(2 * n + 1);
    const Cx am1 = seq.alpha(2 * n - 1);
    const Cx p2n = seq.rho(2 * n), p2n1 = seq.rho(2 * n + 1);
    const Cx pm1 = seq.rho(2 * n - 1);
    Mat2C sys{std::conj(a2n1) * p2n, p2n1 * p2n,
              std::conj(a2n1) * a2n + z, p2n1 * a2n};
    std::array<Cx, 2> rhs{
        z * uEven - std::conj(a2n) * std::conj(pm1) * uPrevOdd +
            std::conj(a2n) * am1 * uEven,
        std::conj(p2n) * std::conj(pm1) * uPrevOdd -
            std::conj(p2n) * am1 * uEven};
    return tm::mat_vec(sys.inverse(), rhs);  // (u(2n+1), u(2n+2))
  }

  // Samples u(2 nLo - 1) .. u(2 nHi) from the pair (u(2 nLo - 1), u(2 nLo)).
  std::vector<Cx> run(i64 nLo, i64 nHi, Cx uPrevOdd, Cx uEven) const {
    std::vector<Cx> out{uPrevOdd, uEven};
    for (i64 n = nLo; n < nHi; ++n) {
      auto nxt = advance(n, out[out.size() - 2], out.back());
      out.push_back(nxt[0]);
      out.push_back(nxt[1]);
    }
    return out;
  }
};

}  // namespace

TEST_CASE("step determinants match their closed forms") {
  Rng rng(0x7a11);
  for (auto conv : {RhoConvention::standard, RhoConvention::complexified}) {
    auto seq = models::random_sequence(0.8, 0xd5a3, conv);
    for (int t = 0; t < 1500; ++t) {
      i64 n = static_cast<i64>(rng.next() % 81) - 40;
      Cx z = (t % 2 == 0) ? rng.unit_circle() : off_circle_z(rng);

      Cx detM = tm::transfer_M(seq, n, z).det();
      Cx wantM = std::conj(seq.rho(2 * n - 1)) * std::conj(seq.rho(2 * n - 2)) /
                 (seq.rho(2 * n) * seq.rho(2 * n - 1));
      CHECK(std::abs(detM - wantM) < 1e-12);

      Mat2C N = tm::transfer_N(seq, n, z);
      Cx wantN = std::conj(seq.rho(2 * n)) * std::conj(seq.rho(2 * n - 1)) /
                 (seq.rho(2 * n + 1) * seq.rho(2 * n));
      CHECK(std::abs(N.det() - wantN) < 1e-12);

      // The antidiagonal flip preserves ad - bc, and the closed-form inverse
      // must invert the determinant as well.
      CHECK(tm::transfer_N_mirror(seq, n, z).det() == N.det());
      CHECK(std::abs(tm::transfer_N_inv(seq, n, z).det() * N.det() - 1.0) <
            1e-12);
    }
  }
}

TEST_CASE("closed-form inverse agrees with the adjugate route") {
  Rng rng(0x1e5b);
  for (auto conv : {RhoConvention::standard, RhoConvention::complexified}) {
    auto seq = models::random_sequence(0.8, 0x99c1, conv);
    for (int t = 0; t < 1500; ++t) {
      i64 n = static_cast<i64>(rng.next() % 81) - 40;
      Cx z = (t % 2 == 0) ? rng.unit_circle() : off_circle_z(rng);
      Mat2C N = tm::transfer_N(seq, n, z);
      Mat2C Ninv = tm::transfer_N_inv(seq, n, z);
      CHECK(max_diff(Ninv, N.inverse()) < 1e-11);
      CHECK(max_diff(N * Ninv, Mat2C::identity()) < 1e-12);
      CHECK(max_diff(Ninv * N, Mat2C::identity()) < 1e-12);
    }
  }
}

TEST_CASE("mirrored step is exactly the antidiagonal conjugation") {
  Rng rng(0x33f2);
  for (auto conv : {RhoConvention::standard, RhoConvention::complexified}) {
    auto seq = models::random_sequence(0.85, 0x5077, conv);
    for (int t = 0; t < 400; ++t) {
      i64 n = static_cast<i64>(rng.next() % 61) - 30;
      Cx z = off_circle_z(rng);
      Mat2C sNs = sigma_swap() * tm::transfer_N(seq, n, z) * sigma_swap();
      Mat2C tilde = tm::transfer_N_mirror(seq, n, z);
      CHECK(max_diff(tilde, sNs) == 0.0);
    }
  }
}

TEST_CASE("vanishing coefficients give diagonal shift steps") {
  auto seq = models::constant_sequence(0.0);
  Rng rng(0xbead);
  for (int t = 0; t < 50; ++t) {
    Cx z = rng.unit_circle();
    Cx w = 1.0 / z;

    Mat2C M = tm::transfer_M(seq, t - 25, z);
    CHECK(std::abs(M.a - w) < 1e-15);
    CHECK(std::abs(M.d - z) < 1e-15);
    CHECK(M.b == Cx{});
    CHECK(M.c == Cx{});

    Mat2C N = tm::transfer_N(seq, t - 25, z);
    CHECK(std::abs(N.a - z) < 1e-15);
    CHECK(std::abs(N.d - w) < 1e-15);
    CHECK(N.b == Cx{});
    CHECK(N.c == Cx{});

    Mat2C Ninv = tm::transfer_N_inv(seq, t - 25, z);
    CHECK(std::abs(Ninv.a - w) < 1e-15);
    CHECK(std::abs(Ninv.d - z) < 1e-15);

    Mat2C tilde = tm::transfer_N_mirror(seq, t - 25, z);
    CHECK(std::abs(tilde.a - w) < 1e-15);
    CHECK(std::abs(tilde.d - z) < 1e-15);
  }
}

TEST_CASE("transfer steps reproduce the band recursion") {
  for (auto conv : {RhoConvention::standard, RhoConvention::complexified}) {
    auto seq = models::random_sequence(0.6, 0xa0b1, conv);
    Rng rng(0x52c4);
    Cx z = rng.unit_circle();
    BandRecursion rec{seq, z};
    auto u = rec.run(0, 22, Cx(0.7, -0.2), Cx(-0.4, 0.9));  // u(-1) .. u(44)
    auto at = [&](i64 k) { return u[static_cast<size_t>(k + 1)]; };
    double scale = 0.0;
    for (const auto& v : u) scale = std::max(scale, std::abs(v));

    for (i64 n = 0; n < 21; ++n) {
      auto nPair =
          tm::mat_vec(tm::transfer_N(seq, n, z), {at(2 * n), at(2 * n - 1)});
      CHECK(std::abs(nPair[0] - at(2 * n + 2)) < 1e-12 * scale);
      CHECK(std::abs(nPair[1] - at(2 * n + 1)) < 1e-12 * scale);

      auto iPair = tm::mat_vec(tm::transfer_N_inv(seq, n, z),
                               {at(2 * n + 2), at(2 * n + 1)});
      CHECK(std::abs(iPair[0] - at(2 * n)) < 1e-11 * scale);
      CHECK(std::abs(iPair[1] - at(2 * n - 1)) < 1e-11 * scale);
    }
    for (i64 n = 1; n < 22; ++n) {
      auto mPair = tm::mat_vec(tm::transfer_M(seq, n, z),
                               {at(2 * n - 1), at(2 * n - 2)});
      CHECK(std::abs(mPair[0] - at(2 * n + 1)) < 1e-12 * scale);
      CHECK(std::abs(mPair[1] - at(2 * n)) < 1e-12 * scale);
    }

    auto slice = tm::propagate(seq, z, at(0), at(-1), 0, 0, 22);
    REQUIRE(slice.complete);
    REQUIRE(slice.siteLo == -1);
    REQUIRE(slice.siteHi() == 44);
    for (i64 k = -1; k <= 44; ++k)
      CHECK(std::abs(slice.at(k) - at(k)) < 1e-11 * scale);

    // Anchoring in the middle exercises the inverse leg against the same
    // oracle samples.
    auto mid = tm::propagate(seq, z, at(20), at(19), 10, 0, 22);
    REQUIRE(mid.complete);
    for (i64 k = -1; k <= 44; ++k)
      CHECK(std::abs(mid.at(k) - at(k)) < 1e-10 * scale);
  }
}

TEST_CASE("the two propagation routes agree") {
  auto seq = models::random_sequence(0.55, 0xc3d7, RhoConvention::standard);
  Rng rng(0x4eef);
  Cx z = rng.unit_circle();
  auto u = tm::propagate(seq, z, Cx(0.8, 0.1), Cx(-0.3, 0.5), 0, 0, 40);
  REQUIRE(u.complete);
  auto v = tm::propagate_m(seq, z, u.at(1), u.at(0), 0, 40);
  REQUIRE(v.complete);
  REQUIRE(v.siteLo == 0);
  REQUIRE(v.siteHi() == 81);
  double scale = 0.0;
  for (i64 k = 0; k <= 80; ++k) scale = std::max(scale, std::abs(u.at(k)));
  for (i64 k = 0; k <= 80; ++k)
    CHECK(std::abs(v.at(k) - u.at(k)) < 1e-10 * scale);
}

TEST_CASE("scaled products match naive multiplication") {
  auto seq = models::random_sequence(0.5, 0x77aa, RhoConvention::complexified);
  Rng rng(0x60d1);
  Cx z = rng.unit_circle();

  auto naive = [&](StepKind kind, i64 lo, i64 hi) {
    Mat2C acc = Mat2C::identity();
    for (i64 n = lo; n <= hi; ++n) {
      Mat2C step;
      switch (kind) {
        case StepKind::M: step = tm::transfer_M(seq, n, z); break;
        case StepKind::N: step = tm::transfer_N(seq, n, z); break;
        case StepKind::NInv: step = tm::transfer_N_inv(seq, n, z); break;
        case StepKind::NMirror: step = tm::transfer_N_mirror(seq, n, z); break;
      }
      acc = (kind == StepKind::NInv) ? acc * step : step * acc;
    }
    return acc;
  };

  for (auto kind : {StepKind::M, StepKind::N, StepKind::NInv,
                    StepKind::NMirror}) {
    Mat2C plain = naive(kind, 0, 24);
    auto prod = tm::product_scaled(seq, kind, 0, 24, z);
    CHECK(rel_diff(prod.materialize(), plain) < 1e-10);
    CHECK(std::abs(prod.log_norm2() - std::log(plain.norm2())) < 1e-8);
  }
}

TEST_CASE("empty product range gives the identity") {
  auto seq = models::random_sequence(0.5, 0x1234, RhoConvention::standard);
  auto prod = tm::product_scaled(seq, StepKind::N, 5, 4, Cx(1.0, 0.0));
  CHECK(max_diff(prod.mat, Mat2C::identity()) == 0.0);
  CHECK(prod.twoExp == 0);
  CHECK(prod.rescales == 0);
}

TEST_CASE("inverse-step product inverts the step product") {
  auto seq = models::random_sequence(0.5, 0x8f21, RhoConvention::standard);
  Rng rng(0x2e11);
  for (int t = 0; t < 8; ++t) {
    Cx z = rng.unit_circle();
    Mat2C fwd = tm::product_scaled(seq, StepKind::N, -3, 27, z).materialize();
    Mat2C bwd =
        tm::product_scaled(seq, StepKind::NInv, -3, 27, z).materialize();
    // Rounding in the two products is amplified by the condition number of
    // the forward product, so the residual tolerance carries that factor.
    double kappa = fwd.norm2() * bwd.norm2();
    CHECK(max_diff(bwd * fwd, Mat2C::identity()) < 1e-12 * kappa);
    CHECK(max_diff(fwd * bwd, Mat2C::identity()) < 1e-12 * kappa);
  }
}

TEST_CASE("power-of-two scaling keeps runaway products representable") {
  auto seq = models::random_sequence(0.995, 0x41f7, RhoConvention::standard);
  Cx z(1.0, 0.0);
  auto prod = tm::product_scaled(seq, StepKind::N, 0, 1199, z);
  CHECK(prod.rescales > 0);
  CHECK(prod.twoExp > 0);
  double logNorm = prod.log_norm2();
  CHECK(std::isfinite(logNorm));
  CHECK(logNorm > 750.0);  // far outside plain double range
  CHECK_THROWS_AS((void)prod.materialize(), NumericError);

  prod.normalize_final();
  CHECK(prod.mat.max_abs() >= 1.0);
  CHECK(prod.mat.max_abs() < 2.0);
  CHECK(std::abs(prod.log_norm2() - logNorm) < 1e-9 * std::abs(logNorm));
}

TEST_CASE("product differences obey the telescoping bound") {
  Rng rng(0x9dc2);
  for (int trial = 0; trial < 50; ++trial) {
    int len = 2 + static_cast<int>(rng.next() % 19);
    std::vector<Mat2C> A(len), B(len);
    for (int i = 0; i < len; ++i) {
      A[i] = {rng.disk(1.0), rng.disk(1.0), rng.disk(1.0), rng.disk(1.0)};
      // B is a perturbation of A so the two products stay comparable.
      B[i] = A[i] + Mat2C{rng.disk(0.05), rng.disk(0.05), rng.disk(0.05),
                          rng.disk(0.05)};
    }
    auto chain = [](const std::vector<Mat2C>& f, int lo, int hi) {
      Mat2C acc = Mat2C::identity();
      for (int i = lo; i <= hi; ++i) acc = f[i] * acc;
      return acc;
    };
    double lhs = (chain(A, 0, len - 1) - chain(B, 0, len - 1)).norm2();
    double bound = 0.0;
    for (int i = 0; i < len; ++i) {
      double pre = 1.0, post = 1.0;
      for (int j = i + 1; j < len; ++j) pre *= A[j].norm2();
      for (int j = 0; j < i; ++j) post *= B[j].norm2();
      bound += pre * (A[i] - B[i]).norm2() * post;
    }
    CHECK(lhs <= bound * (1.0 + 1e-12) + 1e-12);
  }
}

TEST_CASE("reflection symmetry turns inverse steps into mirrored steps") {
  Rng rng(0x7d41);
  for (i64 m : {3, 6, 11}) {
    auto base =
        models::random_sequence(0.6, 0x5c0d + static_cast<u64>(m),
                                RhoConvention::complexified);
    auto seq = models::symmetrize_about(base, 2 * (2 * m - 1));
    for (int t = 0; t < 6; ++t) {
      Cx z = rng.unit_circle();
      for (i64 k = 0; k <= 2 * m - 1; ++k) {
        Mat2C lhs = tm::transfer_N_inv(seq, k, z);
        Mat2C rhs = tm::transfer_N_mirror(seq, 2 * m - 1 - k, z);
        CHECK(rel_diff(lhs, rhs) < 1e-12);
      }
    }
  }
}

TEST_CASE("mirrored product carries Phi(m) back to Phi(0)") {
  Rng rng(0xabef);
  for (i64 m : {4, 9}) {
    auto base =
        models::random_sequence(0.55, 0x7e2f + static_cast<u64>(m),
                                RhoConvention::complexified);
    auto seq = models::symmetrize_about(base, 2 * (2 * m - 1));
    for (int t = 0; t < 5; ++t) {
      Cx z = rng.unit_circle();
      auto u = tm::propagate(seq, z, rng.disk(1.0), rng.disk(1.0), 0, 0, 2 * m);
      REQUIRE(u.complete);
      auto mirror =
          tm::product_scaled(seq, StepKind::NMirror, m, 2 * m - 1, z)
              .materialize();
      auto mapped = tm::mat_vec(mirror, tm::phi(u, m));
      auto want = tm::phi(u, 0);
      double scale = std::max(
          {std::abs(want[0]), std::abs(want[1]), std::abs(mapped[0]), 1.0});
      CHECK(std::abs(mapped[0] - want[0]) < 1e-9 * scale);
      CHECK(std::abs(mapped[1] - want[1]) < 1e-9 * scale);
    }
  }
}

TEST_CASE("split branches tie their center samples exactly") {
  auto seq = models::random_sequence(0.5, 0x3f19, RhoConvention::complexified);
  Rng rng(0x1c55);
  i64 m = 7;
  Cx z = rng.unit_circle();
  auto u = tm::propagate(seq, z, rng.disk(1.0), rng.disk(1.0), m, 0, 2 * m);
  REQUIRE(u.complete);
  auto split = tm::reflection_split(u, m);

  CHECK(split.plus.at(2 * m - 1) == split.plus.at(2 * m));
  CHECK(split.minus.at(2 * m - 1) == -split.minus.at(2 * m));

  auto phiPlus = tm::phi(split.plus, m);
  auto phiMinus = tm::phi(split.minus, m);
  double np = std::hypot(std::abs(phiPlus[0]), std::abs(phiPlus[1]));
  double nm = std::hypot(std::abs(phiMinus[0]), std::abs(phiMinus[1]));
  CHECK(split.phiNormPlus == doctest::Approx(np).epsilon(1e-12));
  CHECK(split.phiNormMinus == doctest::Approx(nm).epsilon(1e-12));
  CHECK(split.smallSign == (np <= nm ? +1 : -1));

  // The sum and difference reassemble the original samples.
  for (i64 k = split.plus.siteLo; k <= split.plus.siteHi(); ++k) {
    Cx back = 0.5 * (split.plus.at(k) + split.minus.at(k));
    CHECK(std::abs(back - u.at(k)) < 1e-15);
  }
}

TEST_CASE("reflecting a slice twice returns it") {
  auto seq = models::random_sequence(0.5, 0x90aa, RhoConvention::standard);
  auto u = tm::propagate(seq, Cx(1.0, 0.0), Cx(0.4, 0.2), Cx(0.1, -0.7), 3, 0,
                         6);
  auto v = tm::reflect_slice(tm::reflect_slice(u, 2), 2);
  REQUIRE(v.siteLo == u.siteLo);
  for (i64 k = u.siteLo; k <= u.siteHi(); ++k) CHECK(v.at(k) == u.at(k));
}

TEST_CASE("slice windows normalize and guard their bounds") {
  auto seq = models::random_sequence(0.5, 0x6071, RhoConvention::standard);
  auto u = tm::propagate(seq, Cx(1.0, 0.0), Cx(0.9, 0.0), Cx(0.2, 0.3), 0, 0,
                         10);
  CHECK_THROWS_AS((void)u.at(u.siteLo - 1), std::out_of_range);
  CHECK_THROWS_AS((void)u.at(u.siteHi() + 1), std::out_of_range);
  CHECK_THROWS_AS(u.normalize_window(-10, 5), std::invalid_argument);

  u.normalize_window(0, 10);
  double l2 = 0.0;
  for (i64 k = 0; k <= 10; ++k) l2 += std::norm(u.at(k));
  CHECK(std::sqrt(l2) == doctest::Approx(1.0).epsilon(1e-12));

  auto zero = tm::propagate(seq, Cx(1.0, 0.0), Cx{}, Cx{}, 0, 0, 4);
  CHECK_THROWS_AS(zero.normalize_window(0, 4), NumericError);

  CHECK_THROWS_AS(tm::propagate(seq, Cx(1.0, 0.0), Cx(1.0, 0.0), Cx{}, 7, 0, 3),
                  std::invalid_argument);
  CHECK_THROWS_AS(tm::propagate_m(seq, Cx(1.0, 0.0), Cx(1.0, 0.0), Cx{}, 7, 3),
                  std::invalid_argument);
}

TEST_CASE("runaway growth flags an incomplete slice") {
  auto seq = models::random_sequence(0.999, 0x2b3c, RhoConvention::standard);
  auto u = tm::propagate(seq, Cx(1.0, 0.0), Cx(1.0, 0.0), Cx(0.3, 0.1), 0, 0,
                         4000);
  CHECK_FALSE(u.complete);
  CHECK(u.covers(0));
  CHECK(u.siteHi() < 8000);
  for (const auto& v : u.samples) CHECK(std::isfinite(std::abs(v)));
}

TEST_CASE("degenerate step parameters are rejected") {
  auto seq = models::random_sequence(0.5, 0xfe2d, RhoConvention::standard);
  CHECK_THROWS_AS((void)tm::transfer_N(seq, 0, Cx{}), NumericError);
  CHECK_THROWS_AS((void)tm::transfer_N_inv(seq, 0, Cx{}), NumericError);
  CHECK_THROWS_AS((void)tm::xmat(Cx{}, Cx{}, Cx{}, Cx{}, Cx(1.0, 0.0),
                                 Cx(1.0, 0.0), Cx(1.0, 0.0)),
                  NumericError);
}
