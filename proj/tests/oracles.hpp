#pragma once

// Reference implementations that share no code paths with the library:
// cofactor determinants, plain modular arithmetic, set-based trace counting,
// unmemoized Littlestone recursion.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <set>
#include <vector>

#include "zsdim/setsystem.hpp"

namespace oracle {

using QMatrix = std::vector<std::vector<mpq_class>>;

inline mpq_class det(const QMatrix& m) {
  const std::size_t n = m.size();
  if (n == 0) return 1;
  if (n == 1) return m[0][0];
  mpq_class total = 0;
  for (std::size_t c = 0; c < n; ++c) {
    if (m[0][c] == 0) continue;
    QMatrix minor;
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<mpq_class> row;
      for (std::size_t k = 0; k < n; ++k) {
        if (k != c) row.push_back(m[r][k]);
      }
      minor.push_back(row);
    }
    const mpq_class term = m[0][c] * det(minor);
    total += (c % 2 == 0) ? term : mpq_class(-term);
  }
  return total;
}

/// Largest k with a nonzero k x k minor.
inline std::size_t rank_by_minors(const QMatrix& m) {
  const std::size_t rows = m.size();
  const std::size_t cols = rows ? m[0].size() : 0;
  for (std::size_t k = std::min(rows, cols); k > 0; --k) {
    std::vector<bool> rsel(rows, false), csel(cols, false);
    std::fill(rsel.begin(), rsel.begin() + static_cast<std::ptrdiff_t>(k), true);
    do {
      std::fill(csel.begin(), csel.end(), false);
      std::fill(csel.begin(), csel.begin() + static_cast<std::ptrdiff_t>(k), true);
      do {
        QMatrix sub;
        for (std::size_t r = 0; r < rows; ++r) {
          if (!rsel[r]) continue;
          std::vector<mpq_class> row;
          for (std::size_t c = 0; c < cols; ++c) {
            if (csel[c]) row.push_back(m[r][c]);
          }
          sub.push_back(row);
        }
        if (det(sub) != 0) return k;
      } while (std::prev_permutation(csel.begin(), csel.end()));
    } while (std::prev_permutation(rsel.begin(), rsel.end()));
  }
  return 0;
}

inline std::uint64_t mod_mul(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % p);
}

inline std::uint64_t mod_inv(std::uint64_t a, std::uint64_t p) {
  for (std::uint64_t x = 1; x < p; ++x) {
    if (mod_mul(a, x, p) == 1) return x;
  }
  return 0;
}

/// Distinct traces on the selected points, compared as sorted index lists.
inline std::size_t traces(const std::vector<std::vector<bool>>& sets, const std::vector<std::size_t>& points) {
  std::set<std::vector<bool>> seen;
  for (const auto& s : sets) {
    std::vector<bool> t;
    for (std::size_t x : points) t.push_back(s[x]);
    seen.insert(t);
  }
  return seen.size();
}

inline std::vector<std::vector<bool>> as_bools(const zsdim::SetFamily& fam) {
  std::vector<std::vector<bool>> out;
  for (zsdim::Mask m : fam.sets()) {
    std::vector<bool> s(fam.width());
    for (std::size_t i = 0; i < fam.width(); ++i) s[i] = (m >> i) & 1;
    out.push_back(s);
  }
  return out;
}

/// max over n-subsets of the number of traces, by recursive subset choice.
inline std::size_t pi(const zsdim::SetFamily& fam, std::size_t n) {
  const auto sets = as_bools(fam);
  std::size_t best = 0;
  std::vector<std::size_t> chosen;
  auto rec = [&](auto&& self, std::size_t next) -> void {
    if (chosen.size() == n) {
      best = std::max(best, traces(sets, chosen));
      return;
    }
    for (std::size_t x = next; x < fam.width(); ++x) {
      chosen.push_back(x);
      self(self, x + 1);
      chosen.pop_back();
    }
  };
  rec(rec, 0);
  return best;
}

inline int vcdim(const zsdim::SetFamily& fam) {
  if (fam.empty()) return -1;
  const auto sets = as_bools(fam);
  int best = 0;
  for (std::size_t n = 1; n <= fam.width(); ++n) {
    if (oracle::pi(fam, n) == (std::size_t{1} << n)) best = static_cast<int>(n);
  }
  return best;
}

/// ldim(C) = max over x splitting C of 1 + min(ldim(C_x^-), ldim(C_x^+)), no memo.
inline int ldim(const std::vector<zsdim::Mask>& sets, std::size_t width) {
  if (sets.empty()) return -1;
  int best = 0;
  for (std::size_t x = 0; x < width; ++x) {
    std::vector<zsdim::Mask> lo, hi;
    for (zsdim::Mask s : sets) ((s >> x) & 1 ? hi : lo).push_back(s);
    if (lo.empty() || hi.empty()) continue;
    best = std::max(best, 1 + std::min(ldim(lo, width), ldim(hi, width)));
  }
  return best;
}

/// Well-labeled leaves of the best depth-n tree, by direct recursion on the root point.
inline std::uint64_t rho(const std::vector<zsdim::Mask>& sets, std::size_t width, std::size_t n) {
  if (sets.empty()) return 0;
  if (n == 0) return 1;
  std::uint64_t best = 0;
  for (std::size_t x = 0; x < width; ++x) {
    std::vector<zsdim::Mask> lo, hi;
    for (zsdim::Mask s : sets) ((s >> x) & 1 ? hi : lo).push_back(s);
    best = std::max(best, rho(lo, width, n - 1) + rho(hi, width, n - 1));
  }
  return best;
}

inline std::uint64_t binom_le(std::uint64_t n, int k) {
  // Pascal's triangle rather than the multiplicative formula.
  std::vector<std::vector<std::uint64_t>> c(n + 1, std::vector<std::uint64_t>(n + 1, 0));
  for (std::uint64_t i = 0; i <= n; ++i) {
    c[i][0] = 1;
    for (std::uint64_t j = 1; j <= i; ++j) c[i][j] = c[i - 1][j - 1] + (j <= i - 1 ? c[i - 1][j] : 0);
  }
  std::uint64_t s = 0;
  for (int j = 0; j <= k && static_cast<std::uint64_t>(j) <= n; ++j) s += c[n][static_cast<std::size_t>(j)];
  return s;
}

}  // namespace oracle
