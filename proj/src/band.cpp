#include "cmv/band.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>

namespace cmv::op {

Mat2C theta_block(Cx alpha, Cx rho) {
  if (std::abs(std::norm(alpha) + std::norm(rho) - 1.0) > 1e-9)
    throw std::invalid_argument("theta_block: |alpha|^2 + |rho|^2 != 1");
  return {std::conj(alpha), rho, std::conj(rho), -alpha};
}

Cx GECMVBand::at(i64 r, i64 c) const {
  if (r < rowLo || r > rowHi) throw std::out_of_range("GECMVBand::at row");
  i64 off = c - col_start(r);
  if (off < 0 || off > 3) return Cx(0.0, 0.0);
  return row(r)[static_cast<size_t>(off)];
}

GECMVBand build_gecmv(const CoefficientSequence& seq, i64 rowLo, i64 rowHi) {
  if (rowHi < rowLo) throw std::invalid_argument("build_gecmv: empty window");
  GECMVBand band;
  band.rowLo = rowLo;
  band.rowHi = rowHi;
  band.rows.reserve(static_cast<size_t>(rowHi - rowLo + 1));
  for (i64 r = rowLo; r <= rowHi; ++r) {
    std::array<Cx, 4> e;
    if ((r & 1) == 0) {  // r = 2n, columns 2n-1 .. 2n+2
      Cx a0 = seq.alpha(r), a1 = seq.alpha(r + 1), am1 = seq.alpha(r - 1);
      Cx p0 = seq.rho(r), p1 = seq.rho(r + 1), pm1 = seq.rho(r - 1);
      e[0] = std::conj(a0) * std::conj(pm1);
      e[1] = -std::conj(a0) * am1;
      e[2] = std::conj(a1) * p0;
      e[3] = p1 * p0;
    } else {  // r = 2n+1, columns 2n-1 .. 2n+2
      Cx a0 = seq.alpha(r - 1), a1 = seq.alpha(r), am1 = seq.alpha(r - 2);
      Cx p0 = seq.rho(r - 1), p1 = seq.rho(r), pm1 = seq.rho(r - 2);
      e[0] = std::conj(p0) * std::conj(pm1);
      e[1] = -std::conj(p0) * am1;
      e[2] = -std::conj(a1) * a0;
      e[3] = -p1 * a0;
    }
    band.rows.push_back(e);
  }
  return band;
}

Cx apply_at(const CoefficientSequence& seq, std::span<const Cx> u, i64 uStart,
            i64 n) {
  i64 lo = (n & 1) ? n - 2 : n - 1;
  if (lo < uStart || lo + 3 >= uStart + static_cast<i64>(u.size()))
    throw std::invalid_argument("apply_at: window does not cover the stencil");
  auto U = [&](i64 k) { return u[static_cast<size_t>(k - uStart)]; };
  if ((n & 1) == 0) {
    // [Eu](2n) = conj(a_2n) [conj(p_{2n-1}) u(2n-1) - a_{2n-1} u(2n)]
    //          + p_2n [conj(a_{2n+1}) u(2n+1) + p_{2n+1} u(2n+2)]
    Cx left = std::conj(seq.rho(n - 1)) * U(n - 1) - seq.alpha(n - 1) * U(n);
    Cx right = std::conj(seq.alpha(n + 1)) * U(n + 1) + seq.rho(n + 1) * U(n + 2);
    return std::conj(seq.alpha(n)) * left + seq.rho(n) * right;
  }
  // [Eu](2n+1) = conj(p_2n) [same left bracket] - a_2n [same right bracket]
  i64 m = n - 1;  // even partner 2n
  Cx left = std::conj(seq.rho(m - 1)) * U(m - 1) - seq.alpha(m - 1) * U(m);
  Cx right = std::conj(seq.alpha(m + 1)) * U(m + 1) + seq.rho(m + 1) * U(m + 2);
  return std::conj(seq.rho(m)) * left - seq.alpha(m) * right;
}

std::vector<Cx> band_matvec(const GECMVBand& band, std::span<const Cx> u,
                            i64 uStart) {
  std::vector<Cx> out;
  out.reserve(static_cast<size_t>(band.rowHi - band.rowLo + 1));
  for (i64 r = band.rowLo; r <= band.rowHi; ++r) {
    i64 c0 = GECMVBand::col_start(r);
    if (c0 < uStart || c0 + 3 >= uStart + static_cast<i64>(u.size()))
      throw std::invalid_argument("band_matvec: u does not cover the stencil");
    const auto& e = band.row(r);
    Cx acc(0.0, 0.0);
    for (int j = 0; j < 4; ++j)
      acc += e[static_cast<size_t>(j)] * u[static_cast<size_t>(c0 + j - uStart)];
    out.push_back(acc);
  }
  return out;
}

namespace {

// Entry (r, c) of the product (even layer) * (odd layer), computed from the
// two Theta blocks that can contribute. Even-layer blocks live on {2m, 2m+1},
// odd-layer blocks on {2m+1, 2m+2}.
Cx layer_product_entry(const CoefficientSequence& seq, i64 r, i64 c) {
  // Row r of the even layer is supported on its block pair {e, e+1}.
  i64 e = (r & 1) ? r - 1 : r;
  Cx le, leP;  // L(r, e), L(r, e+1)
  {
    Mat2C th = theta_block(seq.alpha(e), seq.rho(e));
    if (r == e) {
      le = th.a;
      leP = th.b;
    } else {
      le = th.c;
      leP = th.d;
    }
  }
  auto modd = [&](i64 i, i64 j) -> Cx {  // odd-layer entry (i, j)
    i64 blk = (i & 1) ? i : i - 1;       // block pair {blk, blk+1}, blk odd
    if (j != blk && j != blk + 1) return Cx(0.0, 0.0);
    Mat2C th = theta_block(seq.alpha(blk), seq.rho(blk));
    if (i == blk) return j == blk ? th.a : th.b;
    return j == blk ? th.c : th.d;
  };
  return le * modd(e, c) + leP * modd(e + 1, c);
}

}  // namespace

double lm_check(const CoefficientSequence& seq, i64 rowLo, i64 rowHi) {
  GECMVBand band = build_gecmv(seq, rowLo, rowHi);
  double worst = 0.0;
  for (i64 r = rowLo; r <= rowHi; ++r)
    for (i64 c = r - 2; c <= r + 2; ++c)
      worst = std::max(worst,
                       std::abs(band.at(r, c) - layer_product_entry(seq, r, c)));
  return worst;
}

double layer_eig_residual(const CoefficientSequence& seq, Cx z,
                          std::span<const Cx> u, i64 uStart, i64 nLo, i64 nHi) {
  auto U = [&](i64 k) -> Cx {
    i64 off = k - uStart;
    if (off < 0 || off >= static_cast<i64>(u.size()))
      throw std::invalid_argument("layer_eig_residual: sample out of window");
    return u[static_cast<size_t>(off)];
  };
  double worst = 0.0;
  for (i64 n = nLo; n <= nHi; ++n) {
    Cx lhs1 = std::conj(seq.rho(2 * n - 1)) * U(2 * n - 1) -
              seq.alpha(2 * n - 1) * U(2 * n);
    Cx rhs1 = z * (seq.alpha(2 * n) * U(2 * n) + seq.rho(2 * n) * U(2 * n + 1));
    Cx lhs2 = std::conj(seq.alpha(2 * n + 1)) * U(2 * n + 1) +
              seq.rho(2 * n + 1) * U(2 * n + 2);
    Cx rhs2 = z * (std::conj(seq.rho(2 * n)) * U(2 * n) -
                   std::conj(seq.alpha(2 * n)) * U(2 * n + 1));
    worst = std::max({worst, std::abs(lhs1 - rhs1), std::abs(lhs2 - rhs2)});
  }
  return worst;
}

TruncatedUnitary truncate_unitary(const CoefficientSequence& seq, i64 a, i64 b) {
  if ((a & 1) != 0 || (b & 1) != 1)
    throw std::invalid_argument(
        "truncate_unitary: window must start on an even site and end on an "
        "odd site (Theta-block aligned)");
  if (b < a) throw std::invalid_argument("truncate_unitary: empty window");
  i64 n = b - a + 1;
  if (n > 4096)
    throw ResourceError("truncate_unitary: window above the 4096-site cap");

  // Even layer: whole blocks {2m, 2m+1} inside [a, b].
  DenseC L(n, n), M(n, n);
  for (i64 s = a; s < b; s += 2) {
    Mat2C th = theta_block(seq.alpha(s), seq.rho(s));
    i64 i = s - a;
    L.at(i, i) = th.a;
    L.at(i, i + 1) = th.b;
    L.at(i + 1, i) = th.c;
    L.at(i + 1, i + 1) = th.d;
  }
  // Odd layer: interior blocks {2m+1, 2m+2}; the straddling blocks at the two
  // cuts degenerate to diagonal entries once the cut coefficients become 1.
  M.at(0, 0) = Cx(-1.0, 0.0);      // -alpha_{a-1} with alpha_{a-1} := 1
  M.at(n - 1, n - 1) = Cx(1.0, 0.0);  // conj(alpha_b) with alpha_b := 1
  for (i64 s = a + 1; s < b - 1; s += 2) {
    Mat2C th = theta_block(seq.alpha(s), seq.rho(s));
    i64 i = s - a;
    M.at(i, i) = th.a;
    M.at(i, i + 1) = th.b;
    M.at(i + 1, i) = th.c;
    M.at(i + 1, i + 1) = th.d;
  }

  TruncatedUnitary t;
  t.a = a;
  t.b = b;
  t.boundary = "alpha at cut indices " + std::to_string(a - 1) + "," +
               std::to_string(b) + " replaced by 1 (decoupled block)";
  // Product of two banded block-diagonals: do it blockwise, O(n).
  t.u = DenseC(n, n);
  for (i64 i = 0; i < n; ++i) {
    i64 e = ((a + i) & 1) ? i - 1 : i;  // even-layer block start (local)
    for (i64 k = e; k <= e + 1; ++k) {
      if (k < 0 || k >= n) continue;
      Cx lv = L.at(i, k);
      if (lv == Cx(0.0, 0.0)) continue;
      for (i64 j = std::max<i64>(0, k - 1); j <= std::min<i64>(n - 1, k + 1); ++j)
        t.u.at(i, j) += lv * M.at(k, j);
    }
  }
  return t;
}

GaugeResult find_diagonal_gauge(const CoefficientSequence& seqA,
                                const CoefficientSequence& seqB, i64 lo,
                                i64 hi) {
  GECMVBand A = build_gecmv(seqA, lo, hi);
  GECMVBand B = build_gecmv(seqB, lo, hi);
  i64 n = hi - lo + 1;
  std::vector<Cx> lambda(static_cast<size_t>(n), Cx(0.0, 0.0));
  std::vector<bool> known(static_cast<size_t>(n), false);
  const double zeroTol = 1e-12;

  auto entryA = [&](i64 r, i64 c) { return A.at(r, c); };
  auto entryB = [&](i64 r, i64 c) { return B.at(r, c); };
  auto inWin = [&](i64 s) { return s >= lo && s <= hi; };

  // Propagate phases across the entry graph from each unseeded site.
  std::deque<i64> queue;
  auto solve_from = [&](i64 r, i64 c) {
    // lambda_r A(r,c) conj(lambda_c) = B(r,c)
    Cx va = entryA(r, c), vb = entryB(r, c);
    if (std::abs(va) <= zeroTol || std::abs(vb) <= zeroTol) return;
    size_t ri = static_cast<size_t>(r - lo), ci = static_cast<size_t>(c - lo);
    if (known[ri] && !known[ci]) {
      Cx lc = std::conj(vb / (lambda[ri] * va));
      lambda[ci] = lc / std::abs(lc);
      known[ci] = true;
      queue.push_back(c);
    } else if (!known[ri] && known[ci]) {
      Cx lr = vb / (va * std::conj(lambda[ci]));
      lambda[ri] = lr / std::abs(lr);
      known[ri] = true;
      queue.push_back(r);
    }
  };

  for (i64 seed = lo; seed <= hi; ++seed) {
    size_t si = static_cast<size_t>(seed - lo);
    if (known[si]) continue;
    lambda[si] = Cx(1.0, 0.0);
    known[si] = true;
    queue.clear();
    queue.push_back(seed);
    while (!queue.empty()) {
      i64 s = queue.front();
      queue.pop_front();
      // entries in row s
      i64 c0 = GECMVBand::col_start(s);
      for (i64 c = c0; c <= c0 + 3; ++c)
        if (inWin(c)) solve_from(s, c);
      // entries in column s: rows r with col_start(r) <= s <= col_start(r)+3
      for (i64 r = s - 2; r <= s + 2; ++r)
        if (inWin(r)) {
          i64 rc0 = GECMVBand::col_start(r);
          if (s >= rc0 && s <= rc0 + 3) solve_from(r, s);
        }
    }
  }

  GaugeResult res;
  res.lo = lo;
  res.phases = lambda;
  double worst = 0.0;
  for (i64 r = lo; r <= hi; ++r) {
    i64 c0 = GECMVBand::col_start(r);
    for (i64 c = c0; c <= c0 + 3; ++c) {
      if (!inWin(c)) continue;
      Cx conjugated = lambda[static_cast<size_t>(r - lo)] * entryA(r, c) *
                      std::conj(lambda[static_cast<size_t>(c - lo)]);
      worst = std::max(worst, std::abs(conjugated - entryB(r, c)));
    }
  }
  res.residual = worst;
  return res;
}

}  // namespace cmv::op
