#pragma once

// Finite set systems over an indexed ground set. Sets are bit masks over the
// ground points; every dimension computation here is definitional brute force.

#include <algorithm>
#include <bit>
#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "zsdim/error.hpp"
#include "zsdim/exactalg.hpp"

namespace zsdim {

using Mask = std::uint64_t;

/// Hard storage width of a mask.
inline constexpr std::size_t kMaxWidth = 64;
/// Soft limits for the exponential searches.
inline constexpr std::size_t kGroundSoftLimit = 20;
inline constexpr std::size_t kFamilySoftLimit = 4096;

inline constexpr Mask low_bits(std::size_t n) { return n >= 64 ? ~Mask{0} : (Mask{1} << n) - 1; }

inline std::uint64_t binom(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// C(n,0) + ... + C(n,k); zero when k < 0.
inline std::uint64_t binom_le(std::uint64_t n, long long k) {
  std::uint64_t s = 0;
  for (long long i = 0; i <= k; ++i) s += binom(n, static_cast<std::uint64_t>(i));
  return s;
}

/// Calls fn(mask) for every k-subset of the low n bits, in increasing order.
template <typename Fn>
void for_each_subset_of_size(std::size_t n, std::size_t k, Fn&& fn) {
  if (k > n) return;
  if (k == 0) {
    fn(Mask{0});
    return;
  }
  Mask s = low_bits(k);
  const Mask limit = low_bits(n);
  while (true) {
    fn(s);
    if (s == (limit & ~low_bits(n - k))) break;
    const Mask c = s & (~s + 1);
    const Mask r = s + c;
    s = (((r ^ s) >> 2) / c) | r;
  }
}

/// Either a natural number or the negative-infinity marker used for the
/// empty family.
class Dim {
 public:
  static Dim neg_infinity() noexcept { return Dim(); }
  static Dim of(int v) noexcept { return Dim(v); }

  bool is_neg_infinity() const noexcept { return !value_.has_value(); }
  int value() const {
    if (!value_) throw InvalidInput("dimension is negative infinity");
    return *value_;
  }

  friend bool operator==(const Dim&, const Dim&) = default;
  friend std::strong_ordering operator<=>(const Dim& a, const Dim& b) {
    if (a.is_neg_infinity() || b.is_neg_infinity()) {
      return b.is_neg_infinity() <=> a.is_neg_infinity();
    }
    return *a.value_ <=> *b.value_;
  }

  std::string str() const { return value_ ? std::to_string(*value_) : "-inf"; }

 private:
  Dim() = default;
  explicit Dim(int v) : value_(v) {}
  std::optional<int> value_;
};

class GroundSet {
 public:
  GroundSet() = default;

  explicit GroundSet(std::size_t n) {
    if (n > kMaxWidth) throw ResourceLimit("ground set wider than " + std::to_string(kMaxWidth));
    labels_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) labels_.push_back(std::to_string(i));
  }

  explicit GroundSet(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.size() > kMaxWidth) throw ResourceLimit("ground set wider than " + std::to_string(kMaxWidth));
    std::set<std::string> seen(labels_.begin(), labels_.end());
    if (seen.size() != labels_.size()) throw InvalidInput("ground set labels are not distinct");
  }

  std::size_t size() const noexcept { return labels_.size(); }
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  Mask full() const noexcept { return low_bits(size()); }

  friend bool operator==(const GroundSet&, const GroundSet&) = default;

 private:
  std::vector<std::string> labels_;
};

/// A family of distinct subsets of a ground set, optionally paired with the
/// coefficient vector that generated each set.
class SetFamily {
 public:
  SetFamily() = default;
  explicit SetFamily(GroundSet ground) : ground_(std::move(ground)) {}

  SetFamily(GroundSet ground, std::span<const Mask> sets) : ground_(std::move(ground)) {
    for (Mask m : sets) insert(m);
  }

  /// Inserts unless already present; returns whether the set was new.
  bool insert(Mask m, std::optional<Vector> witness = std::nullopt) {
    if ((m & ~ground_.full()) != 0) {
      throw InvalidInput("set has bits outside a ground set of width " + std::to_string(width()));
    }
    if (!index_.insert(m).second) return false;
    sets_.push_back(m);
    witnesses_.push_back(std::move(witness));
    return true;
  }

  const GroundSet& ground() const noexcept { return ground_; }
  std::size_t width() const noexcept { return ground_.size(); }
  std::size_t size() const noexcept { return sets_.size(); }
  bool empty() const noexcept { return sets_.empty(); }
  const std::vector<Mask>& sets() const noexcept { return sets_; }
  const std::optional<Vector>& witness(std::size_t i) const { return witnesses_.at(i); }
  bool contains(Mask m) const { return index_.count(m) != 0; }

  std::optional<std::size_t> index_of(Mask m) const {
    auto it = std::find(sets_.begin(), sets_.end(), m);
    if (it == sets_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - sets_.begin());
  }

  /// Sorted masks: the canonical form used for comparison and memoization.
  std::vector<Mask> canonical() const {
    std::vector<Mask> c = sets_;
    std::sort(c.begin(), c.end());
    return c;
  }

  /// Equality as set systems: same width and same collection of sets.
  bool same_sets(const SetFamily& o) const { return width() == o.width() && canonical() == o.canonical(); }

 private:
  GroundSet ground_;
  std::vector<Mask> sets_;
  std::vector<std::optional<Vector>> witnesses_;
  std::unordered_set<Mask> index_;
};

/// Compresses the bits of m selected by sel into the low bits.
inline Mask compress_bits(Mask m, Mask sel) {
  Mask out = 0;
  std::size_t k = 0;
  while (sel != 0) {
    const int b = std::countr_zero(sel);
    if ((m >> b) & 1) out |= Mask{1} << k;
    ++k;
    sel &= sel - 1;
  }
  return out;
}

inline void require_desk_scale(const SetFamily& fam) {
  if (fam.width() > kGroundSoftLimit) {
    throw ResourceLimit("ground set of " + std::to_string(fam.width()) + " points exceeds the limit of " +
                        std::to_string(kGroundSoftLimit));
  }
  if (fam.size() > kFamilySoftLimit) {
    throw ResourceLimit("family of " + std::to_string(fam.size()) + " sets exceeds the limit of " +
                        std::to_string(kFamilySoftLimit));
  }
}

/// The induced system on the selected points. Ground indices are renumbered
/// in increasing order; merged sets keep the witness of their first source.
inline SetFamily restrict(const SetFamily& fam, Mask subset) {
  if ((subset & ~fam.ground().full()) != 0) {
    throw InvalidInput("restriction mask wider than the ground set");
  }
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < fam.width(); ++i) {
    if ((subset >> i) & 1) labels.push_back(fam.ground().label(i));
  }
  SetFamily out{GroundSet(std::move(labels))};
  for (std::size_t i = 0; i < fam.size(); ++i) {
    out.insert(compress_bits(fam.sets()[i], subset), fam.witness(i));
  }
  return out;
}

/// Number of distinct traces A & subset.
inline std::size_t trace_count(const SetFamily& fam, Mask subset) {
  std::vector<Mask> traces;
  traces.reserve(fam.size());
  for (Mask s : fam.sets()) traces.push_back(s & subset);
  std::sort(traces.begin(), traces.end());
  return static_cast<std::size_t>(std::unique(traces.begin(), traces.end()) - traces.begin());
}

inline bool shatters(const SetFamily& fam, Mask subset) {
  if ((subset & ~fam.ground().full()) != 0) throw InvalidInput("subset mask wider than the ground set");
  const int k = std::popcount(subset);
  if (k >= 63 || fam.size() < (std::size_t{1} << k)) return false;
  return trace_count(fam, subset) == (std::size_t{1} << k);
}

/// The lowest shattered subset of maximum size, or nullopt for the empty family.
inline std::optional<Mask> largest_shattered_set(const SetFamily& fam) {
  require_desk_scale(fam);
  if (fam.empty()) return std::nullopt;
  Mask best = 0;
  for (std::size_t k = 1; k <= fam.width(); ++k) {
    if ((std::size_t{1} << k) > fam.size()) break;
    std::optional<Mask> found;
    for_each_subset_of_size(fam.width(), k, [&](Mask s) {
      if (!found && shatters(fam, s)) found = s;
    });
    if (!found) break;
    best = *found;
  }
  return best;
}

inline Dim vcdim(const SetFamily& fam) {
  const auto s = largest_shattered_set(fam);
  if (!s) return Dim::neg_infinity();
  return Dim::of(std::popcount(*s));
}

/// VC shatter function: max over n-subsets Y of |fam restricted to Y|.
inline std::uint64_t pi(const SetFamily& fam, std::size_t n) {
  if (n > fam.width()) {
    throw InvalidInput("pi(" + std::to_string(n) + ") on a ground set of " + std::to_string(fam.width()) +
                       " points");
  }
  require_desk_scale(fam);
  if (fam.empty()) return 0;
  const std::size_t cap = n >= 63 ? fam.size() : std::min<std::size_t>(fam.size(), std::size_t{1} << n);
  std::size_t best = 0;
  for_each_subset_of_size(fam.width(), n, [&](Mask s) {
    if (best < cap) best = std::max(best, trace_count(fam, s));
  });
  return best;
}

/// VC dimension as the largest depth of a well-labeled level-balanced tree.
/// A level-balanced tree is a sequence of level points (repeats allowed); a
/// leaf is well-labeled when some set matches its branch bits on every level.
/// Independent of shatters()/trace_count() so the two can check each other.
inline Dim vcdim_via_trees(const SetFamily& fam) {
  require_desk_scale(fam);
  if (fam.empty()) return Dim::neg_infinity();
  const std::size_t n = fam.width();

  auto all_leaves_labeled = [&](const std::vector<std::size_t>& levels) {
    const std::size_t depth = levels.size();
    for (Mask leaf = 0; leaf < (Mask{1} << depth); ++leaf) {
      bool labeled = false;
      for (Mask set : fam.sets()) {
        bool ok = true;
        for (std::size_t k = 0; k < depth && ok; ++k) {
          const bool branch = (leaf >> (depth - 1 - k)) & 1;
          const bool member = (set >> levels[k]) & 1;
          ok = branch == member;
        }
        if (ok) {
          labeled = true;
          break;
        }
      }
      if (!labeled) return false;
    }
    return true;
  };

  int best = 0;
  for (std::size_t depth = 1; (std::size_t{1} << depth) <= fam.size(); ++depth) {
    std::vector<std::size_t> levels(depth, 0);
    bool found = false;
    while (!found) {
      found = all_leaves_labeled(levels);
      std::size_t pos = 0;
      while (pos < depth && ++levels[pos] == n) levels[pos++] = 0;
      if (pos == depth) break;
    }
    if (!found) break;
    best = static_cast<int>(depth);
  }
  return Dim::of(best);
}

}  // namespace zsdim
