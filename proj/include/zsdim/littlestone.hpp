#pragma once

// Labeled binary trees, well-labeled leaves, Littlestone dimension and the
// Littlestone shatter function rho.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "zsdim/error.hpp"
#include "zsdim/setsystem.hpp"

namespace zsdim {

inline constexpr std::size_t kMaxTreeDepth = 20;
inline constexpr std::size_t kDefaultDepthCap = 16;

/// A depth-n binary tree: ground points at the 2^n - 1 internal nodes, family
/// set indices at the 2^n leaves. Position (level k, index i) is the binary
/// string of length k whose value, read most-significant-first, is i.
class LabeledTree {
 public:
  LabeledTree() : LabeledTree(0) {}

  explicit LabeledTree(std::size_t depth) : depth_(depth) {
    if (depth > kMaxTreeDepth) throw ResourceLimit("tree depth " + std::to_string(depth) + " exceeds limit");
    nodes_.assign((std::size_t{1} << depth) - 1, 0);
    leaves_.assign(std::size_t{1} << depth, 0);
  }

  LabeledTree(std::size_t depth, std::vector<std::size_t> nodes, std::vector<std::size_t> leaves)
      : depth_(depth), nodes_(std::move(nodes)), leaves_(std::move(leaves)) {
    if (depth > kMaxTreeDepth) throw ResourceLimit("tree depth " + std::to_string(depth) + " exceeds limit");
    if (nodes_.size() != (std::size_t{1} << depth) - 1 || leaves_.size() != (std::size_t{1} << depth)) {
      throw InvalidInput("labeled tree of depth " + std::to_string(depth) + " is not totally labeled");
    }
  }

  std::size_t depth() const noexcept { return depth_; }
  std::size_t leaf_count() const noexcept { return leaves_.size(); }

  std::size_t node(std::size_t level, std::size_t index) const { return nodes_.at(slot(level, index)); }
  void set_node(std::size_t level, std::size_t index, std::size_t point) { nodes_.at(slot(level, index)) = point; }
  std::size_t leaf(std::size_t index) const { return leaves_.at(index); }
  void set_leaf(std::size_t index, std::size_t set_index) { leaves_.at(index) = set_index; }

  const std::vector<std::size_t>& node_labels() const noexcept { return nodes_; }
  const std::vector<std::size_t>& leaf_labels() const noexcept { return leaves_; }

  static std::string path(std::size_t length, std::size_t index) {
    std::string s(length, '0');
    for (std::size_t k = 0; k < length; ++k) {
      if ((index >> (length - 1 - k)) & 1) s[k] = '1';
    }
    return s;
  }

  static std::size_t path_index(std::string_view p) {
    std::size_t v = 0;
    for (char c : p) {
      if (c != '0' && c != '1') throw InvalidInput("binary string expected, got '" + std::string(p) + "'");
      v = (v << 1) | static_cast<std::size_t>(c == '1');
    }
    return v;
  }

  bool level_balanced() const {
    for (std::size_t k = 0; k < depth_; ++k) {
      for (std::size_t i = 1; i < (std::size_t{1} << k); ++i) {
        if (node(k, i) != node(k, 0)) return false;
      }
    }
    return true;
  }

  /// Labels must reference existing ground points and family sets.
  void validate(const SetFamily& fam) const {
    for (std::size_t x : nodes_) {
      if (x >= fam.width()) throw InvalidInput("node label " + std::to_string(x) + " is not a ground point");
    }
    for (std::size_t s : leaves_) {
      if (s >= fam.size()) throw InvalidInput("leaf label " + std::to_string(s) + " is not a family set");
    }
  }

  friend bool operator==(const LabeledTree&, const LabeledTree&) = default;

 private:
  std::size_t slot(std::size_t level, std::size_t index) const {
    if (level >= depth_ || index >= (std::size_t{1} << level)) throw InvalidInput("node position out of range");
    return (std::size_t{1} << level) - 1 + index;
  }

  std::size_t depth_;
  std::vector<std::size_t> nodes_;
  std::vector<std::size_t> leaves_;
};

/// Leaf tau is well-labeled when every node on its path holds a point that
/// belongs to the leaf set exactly when the path turns right (bit 1) there.
inline bool leaf_well_labeled(const LabeledTree& tree, const SetFamily& fam, std::size_t leaf) {
  const std::size_t depth = tree.depth();
  if (leaf >= tree.leaf_count()) throw InvalidInput("leaf index out of range");
  const std::size_t set_index = tree.leaf(leaf);
  if (set_index >= fam.size()) throw InvalidInput("leaf label is not a family set");
  const Mask set = fam.sets()[set_index];
  for (std::size_t k = 0; k < depth; ++k) {
    const std::size_t prefix = leaf >> (depth - k);
    const std::size_t point = tree.node(k, prefix);
    if (point >= fam.width()) throw InvalidInput("node label is not a ground point");
    const bool branch = (leaf >> (depth - 1 - k)) & 1;
    const bool member = (set >> point) & 1;
    if (branch != member) return false;
  }
  return true;
}

inline bool leaf_well_labeled(const LabeledTree& tree, const SetFamily& fam, std::string_view leaf) {
  if (leaf.size() != tree.depth()) throw InvalidInput("leaf string length differs from tree depth");
  return leaf_well_labeled(tree, fam, LabeledTree::path_index(leaf));
}

inline std::uint64_t count_well_labeled(const LabeledTree& tree, const SetFamily& fam) {
  std::uint64_t n = 0;
  for (std::size_t leaf = 0; leaf < tree.leaf_count(); ++leaf) n += leaf_well_labeled(tree, fam, leaf) ? 1 : 0;
  return n;
}

enum class ProfileKind { vc, littlestone };

struct ShatterProfile {
  ProfileKind kind;
  std::vector<std::uint64_t> values;
};

/// Memoized split recursions for ldim and rho over one family. A subfamily is
/// keyed by its sorted mask list.
class LittlestoneSearch {
 public:
  explicit LittlestoneSearch(const SetFamily& fam, std::size_t depth_cap = kDefaultDepthCap)
      : fam_(fam), width_(fam.width()), depth_cap_(depth_cap) {
    require_desk_scale(fam);
  }

  Dim ldim() {
    if (fam_.empty()) return Dim::neg_infinity();
    return Dim::of(ldim_of(fam_.canonical()));
  }

  std::uint64_t rho(std::size_t n) {
    if (n > depth_cap_) {
      throw ResourceLimit("rho depth " + std::to_string(n) + " exceeds the cap of " + std::to_string(depth_cap_));
    }
    if (fam_.empty() || (width_ == 0 && n > 0)) return 0;
    return rho_of(fam_.canonical(), n);
  }

  /// A fully well-labeled tree of depth ldim. Splitting points are the lowest
  /// indices that work; leaves take the least mask of their subfamily.
  LabeledTree witness() {
    if (fam_.empty()) throw InvalidInput("the empty family has no witness tree");
    const int depth = ldim_of(fam_.canonical());
    LabeledTree tree(static_cast<std::size_t>(depth));
    build(fam_.canonical(), static_cast<std::size_t>(depth), 0, 0, tree);
    return tree;
  }

 private:
  using Family = std::vector<Mask>;

  struct FamilyHash {
    std::size_t operator()(const Family& f) const noexcept {
      std::size_t h = f.size();
      for (Mask m : f) h ^= std::hash<Mask>{}(m) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      return h;
    }
  };

  static void split(const Family& sets, std::size_t x, Family& minus, Family& plus) {
    minus.clear();
    plus.clear();
    for (Mask s : sets) ((s >> x) & 1 ? plus : minus).push_back(s);
  }

  int ldim_of(const Family& sets) {
    if (sets.size() <= 1) return 0;
    if (auto it = ldim_memo_.find(sets); it != ldim_memo_.end()) return it->second;
    // A fully well-labeled tree of depth k needs 2^k distinct leaf sets.
    const int bound = std::bit_width(sets.size()) - 1;
    int best = 0;
    Family minus, plus;
    for (std::size_t x = 0; x < width_ && best < bound; ++x) {
      split(sets, x, minus, plus);
      if (minus.empty() || plus.empty()) continue;
      const int a = ldim_of(minus);
      if (a + 1 <= best) continue;
      const int b = ldim_of(plus);
      best = std::max(best, 1 + std::min(a, b));
    }
    ldim_memo_.emplace(sets, best);
    return best;
  }

  std::uint64_t rho_of(const Family& sets, std::size_t n) {
    if (sets.empty()) return 0;
    if (n == 0 || sets.size() == 1) return 1;
    auto& memo = rho_memo_[n];
    if (auto it = memo.find(sets); it != memo.end()) return it->second;
    // Distinct well-labeled leaves diverge at a shared node, so they carry
    // distinct sets: rho <= |C|, and trivially rho <= 2^n.
    const std::uint64_t bound = std::min<std::uint64_t>(sets.size(), n >= 63 ? ~0ULL : (1ULL << n));
    std::uint64_t best = 0;
    bool tried_neutral = false;
    Family minus, plus;
    for (std::size_t x = 0; x < width_ && best < bound; ++x) {
      split(sets, x, minus, plus);
      if (minus.empty() || plus.empty()) {
        // Every non-splitting point gives the same value.
        if (tried_neutral) continue;
        tried_neutral = true;
        best = std::max(best, rho_of(sets, n - 1));
        continue;
      }
      best = std::max(best, rho_of(minus, n - 1) + rho_of(plus, n - 1));
    }
    memo.emplace(sets, best);
    return best;
  }

  void build(const Family& sets, std::size_t k, std::size_t level, std::size_t index, LabeledTree& tree) {
    if (k == 0) {
      tree.set_leaf(index, *fam_.index_of(sets.front()));
      return;
    }
    Family minus, plus;
    for (std::size_t x = 0; x < width_; ++x) {
      split(sets, x, minus, plus);
      if (minus.empty() || plus.empty()) continue;
      if (ldim_of(minus) + 1 < static_cast<int>(k) || ldim_of(plus) + 1 < static_cast<int>(k)) continue;
      tree.set_node(level, index, x);
      build(minus, k - 1, level + 1, 2 * index, tree);
      build(plus, k - 1, level + 1, 2 * index + 1, tree);
      return;
    }
    throw Error("internal: no splitting point for a witness subtree");
  }

  const SetFamily& fam_;
  std::size_t width_;
  std::size_t depth_cap_;
  std::unordered_map<Family, int, FamilyHash> ldim_memo_;
  std::unordered_map<std::size_t, std::unordered_map<Family, std::uint64_t, FamilyHash>> rho_memo_;
};

inline Dim ldim(const SetFamily& fam) { return LittlestoneSearch(fam).ldim(); }

inline LabeledTree ldim_witness(const SetFamily& fam) { return LittlestoneSearch(fam).witness(); }

inline std::uint64_t rho(const SetFamily& fam, std::size_t n, std::size_t depth_cap = kDefaultDepthCap) {
  return LittlestoneSearch(fam, depth_cap).rho(n);
}

/// Upper limit on node labelings rho_via_trees will enumerate.
inline constexpr std::uint64_t kTreeOracleBudget = 50'000'000;

/// rho by exhaustive enumeration of node labelings. For a fixed labeling the
/// best leaf labels are chosen independently per leaf, so the count is the
/// number of leaves whose branch constraints some set satisfies.
inline std::uint64_t rho_via_trees(const SetFamily& fam, std::size_t n) {
  if (fam.empty()) return 0;
  if (n == 0) return 1;
  if (fam.width() == 0) return 0;
  if (fam.size() > 64) throw ResourceLimit("tree oracle supports at most 64 sets");
  const std::size_t points = fam.width();
  const std::size_t internal = (std::size_t{1} << n) - 1;
  double labelings = 1;
  for (std::size_t i = 0; i < internal; ++i) labelings *= static_cast<double>(points);
  if (labelings > static_cast<double>(kTreeOracleBudget)) {
    throw ResourceLimit("tree oracle would enumerate " + std::to_string(labelings) + " labelings");
  }

  // containing[x] = bitmask of family indices whose set contains x.
  std::vector<std::uint64_t> containing(points, 0);
  for (std::size_t s = 0; s < fam.size(); ++s) {
    for (std::size_t x = 0; x < fam.width(); ++x) {
      if ((fam.sets()[s] >> x) & 1) containing[x] |= std::uint64_t{1} << s;
    }
  }
  const std::uint64_t all = fam.size() == 64 ? ~0ULL : (1ULL << fam.size()) - 1;

  std::vector<std::size_t> labels(internal, 0);
  std::uint64_t best = 0;
  const std::uint64_t cap = std::min<std::uint64_t>(fam.size(), 1ULL << n);
  while (true) {
    std::uint64_t count = 0;
    for (std::size_t leaf = 0; leaf < (std::size_t{1} << n); ++leaf) {
      std::uint64_t ok = all;
      for (std::size_t k = 0; k < n && ok; ++k) {
        const std::size_t prefix = leaf >> (n - k);
        const std::size_t x = labels[(std::size_t{1} << k) - 1 + prefix];
        const bool branch = (leaf >> (n - 1 - k)) & 1;
        ok &= branch ? containing[x] : ~containing[x];
      }
      if (ok) ++count;
    }
    best = std::max(best, count);
    if (best == cap) break;
    std::size_t pos = 0;
    while (pos < internal && ++labels[pos] == points) labels[pos++] = 0;
    if (pos == internal) break;
  }
  return best;
}

inline ShatterProfile vc_profile(const SetFamily& fam, std::size_t n_max) {
  ShatterProfile p{ProfileKind::vc, {}};
  for (std::size_t n = 0; n <= std::min(n_max, fam.width()); ++n) p.values.push_back(pi(fam, n));
  return p;
}

inline ShatterProfile littlestone_profile(const SetFamily& fam, std::size_t n_max,
                                          std::size_t depth_cap = kDefaultDepthCap) {
  LittlestoneSearch search(fam, depth_cap);
  ShatterProfile p{ProfileKind::littlestone, {}};
  for (std::size_t n = 0; n <= n_max; ++n) p.values.push_back(search.rho(n));
  return p;
}

}  // namespace zsdim
