#pragma once

// Constructive witnesses: dual bases, shattered sets, d-wise independent
// sequences with subset-selecting coefficient vectors, the plane-union family
// and its explicit maximal Littlestone tree.

#include <algorithm>
#include <bit>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "zsdim/error.hpp"
#include "zsdim/exactalg.hpp"
#include "zsdim/littlestone.hpp"
#include "zsdim/setsystem.hpp"
#include "zsdim/zerosets.hpp"

namespace zsdim {

inline constexpr std::size_t kDefaultScanBudget = 10000;

/// One checked dot-product claim a . f(c).
struct DotClaim {
  enum class Expect { zero, nonzero, one };
  std::string witness;
  std::string point;
  Scalar value;
  Expect expect;

  bool holds() const {
    switch (expect) {
      case Expect::zero: return value.is_zero();
      case Expect::nonzero: return !value.is_zero();
      case Expect::one: return value.is_one();
    }
    return false;
  }
};

using Transcript = std::vector<DotClaim>;

inline bool transcript_holds(const Transcript& t) {
  return std::all_of(t.begin(), t.end(), [](const DotClaim& c) { return c.holds(); });
}

/// A stream scan that ran out of budget; carries the state reached so far.
class SearchExhausted : public ResourceLimit {
 public:
  SearchExhausted(const std::string& what, std::vector<Point> partial,
                  std::vector<std::vector<std::size_t>> blocking = {})
      : ResourceLimit(what), partial_(std::move(partial)), blocking_(std::move(blocking)) {}

  const std::vector<Point>& partial() const noexcept { return partial_; }
  /// Index subsets of the partial sequence whose spans absorbed scanned points.
  const std::vector<std::vector<std::size_t>>& blocking() const noexcept { return blocking_; }

 private:
  std::vector<Point> partial_;
  std::vector<std::vector<std::size_t>> blocking_;
};

/// c_0..c_{d-1} and g_j = sum_i G[j][i] f_i with g_j(c_i) = [i = j].
struct DualBasis {
  std::vector<Point> points;
  std::vector<Vector> images;
  Matrix coeffs;

  std::size_t dim() const noexcept { return points.size(); }

  Transcript kronecker_transcript() const {
    Transcript t;
    for (std::size_t j = 0; j < dim(); ++j) {
      for (std::size_t i = 0; i < dim(); ++i) {
        t.push_back(DotClaim{"g_" + std::to_string(j), point_label(points[i]), dot(coeffs.row(j), images[i]),
                             i == j ? DotClaim::Expect::one : DotClaim::Expect::zero});
      }
    }
    return t;
  }

  bool kronecker_holds() const { return transcript_holds(kronecker_transcript()) && rank(coeffs) == dim(); }
};

/// Follows the induction on d: g_0 = f_0 / f_0(c_0); at step m the candidate
/// g'_m = f_m - sum_i f_m(c_i) g_i vanishes on c_0..c_{m-1}, a point c_m with
/// g'_m(c_m) != 0 is found by scanning, g_m = g'_m / g'_m(c_m), and the earlier
/// g_i are corrected by g_i - g_i(c_m) g_m.
inline DualBasis dual_basis(const Instance& inst, std::size_t budget = kDefaultScanBudget) {
  const std::size_t d = inst.dim;
  const Field f = inst.field;
  DualBasis db{{}, {}, Matrix(f, d, d)};
  std::vector<Vector> g;

  for (std::size_t m = 0; m < d; ++m) {
    Vector candidate = Vector::unit(f, d, m);
    for (std::size_t i = 0; i < m; ++i) candidate -= db.images[i][m] * g[i];

    auto next = inst.stream.open();
    std::optional<Point> found;
    Vector found_image(f, d);
    Scalar value(f);
    for (std::size_t scanned = 0; scanned < budget && !found; ++scanned) {
      auto p = next();
      if (!p) break;
      Vector img = inst.image(*p);
      value = dot(candidate, img);
      if (!value.is_zero()) {
        found = std::move(*p);
        found_image = std::move(img);
      }
    }
    if (!found) {
      throw SearchExhausted("no point within " + std::to_string(budget) + " stream points where g'_" +
                                std::to_string(m) + " is nonzero; f may be linearly dependent",
                            db.points);
    }
    Vector gm = value.inverse() * candidate;
    for (std::size_t i = 0; i < m; ++i) g[i] -= dot(g[i], found_image) * gm;
    g.push_back(std::move(gm));
    db.points.push_back(std::move(*found));
    db.images.push_back(std::move(found_image));
  }
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t i = 0; i < d; ++i) db.coeffs(j, i) = g[j][i];
  if (!db.kronecker_holds()) throw Error("internal: dual basis fails the Kronecker check");
  return db;
}

/// c_0..c_{d-2} with a_S = sum_{i in S} g_i for every nonempty S of [d];
/// c_i lies in Z_{f,a_S} exactly when i is not in S.
struct ShatteredSet {
  std::vector<Point> points;
  std::vector<std::pair<Mask, Vector>> witnesses;
  SetFamily family;
  Transcript transcript;
};

inline ShatteredSet shattered_set(const DualBasis& db) {
  const std::size_t d = db.dim();
  if (d == 0) throw InvalidInput("empty dual basis");
  const Field f = db.coeffs(0, 0).field();
  ShatteredSet out;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i + 1 < d; ++i) {
    out.points.push_back(db.points[i]);
    labels.push_back(point_label(db.points[i]));
  }
  out.family = SetFamily(GroundSet(std::move(labels)));
  for (Mask s = 1; s < (Mask{1} << d); ++s) {
    Vector a(f, d);
    for (std::size_t i = 0; i < d; ++i) {
      if ((s >> i) & 1) a += db.coeffs.row(i);
    }
    Mask trace = 0;
    std::string name = "a_{";
    for (std::size_t i = 0; i < d; ++i) {
      if ((s >> i) & 1) name += (name.size() > 3 ? "," : "") + std::to_string(i);
    }
    name += "}";
    for (std::size_t i = 0; i < d; ++i) {
      const Scalar v = dot(a, db.images[i]);
      const bool in_s = (s >> i) & 1;
      out.transcript.push_back(DotClaim{name, point_label(db.points[i]), v,
                                        in_s ? DotClaim::Expect::nonzero : DotClaim::Expect::zero});
      if (i + 1 < d && v.is_zero()) trace |= Mask{1} << i;
    }
    Vector canon = a.canonical();
    out.family.insert(trace, canon);
    out.witnesses.emplace_back(s, std::move(canon));
  }
  return out;
}

/// c_0..c_{n-1} such that every at most d of the images are independent.
struct IndependenceSequence {
  Field field = Field::rational();
  std::size_t dim = 1;
  std::vector<Point> points;
  std::vector<Vector> images;

  std::size_t size() const noexcept { return points.size(); }

  /// Checks the defining property subset by subset.
  bool verify() const {
    const std::size_t n = size();
    for (std::size_t k = 1; k <= std::min(dim, n); ++k) {
      bool ok = true;
      for_each_subset_of_size(n, k, [&](Mask s) {
        if (!ok) return;
        std::vector<Vector> rows;
        for (Mask t = s; t; t &= t - 1) rows.push_back(images[static_cast<std::size_t>(std::countr_zero(t))]);
        ok = rank(rows) == k;
      });
      if (!ok) return false;
    }
    return true;
  }
};

inline std::vector<std::size_t> mask_indices(Mask m) {
  std::vector<std::size_t> out;
  for (; m; m &= m - 1) out.push_back(static_cast<std::size_t>(std::countr_zero(m)));
  return out;
}

/// Greedy: accept the next stream point whose image avoids U, the union of the
/// spans of all fewer-than-d chosen images.
inline IndependenceSequence independence_sequence(const Instance& inst, std::size_t n,
                                                  std::size_t budget = kDefaultScanBudget) {
  if (n == 0) throw InvalidInput("sequence length must be at least 1");
  if (n > kMaxWidth) throw ResourceLimit("sequence longer than " + std::to_string(kMaxWidth));
  const std::size_t d = inst.dim;
  IndependenceSequence seq{inst.field, d, {}, {}};
  // Spans of the chosen subsets of size < d, keyed by index mask.
  std::vector<std::pair<Mask, RowSpace>> spans{{Mask{0}, RowSpace(inst.field, d)}};
  auto next = inst.stream.open();

  while (seq.size() < n) {
    std::map<Mask, bool> blocked;
    bool accepted = false;
    for (std::size_t scanned = 0; scanned < budget && !accepted; ++scanned) {
      auto p = next();
      if (!p) break;
      Vector img = inst.image(*p);
      auto hit = std::find_if(spans.begin(), spans.end(), [&](const auto& s) { return s.second.contains(img); });
      if (hit != spans.end()) {
        blocked[hit->first] = true;
        continue;
      }
      const std::size_t idx = seq.size();
      const std::size_t existing = spans.size();
      for (std::size_t s = 0; s < existing; ++s) {
        if (static_cast<std::size_t>(std::popcount(spans[s].first)) + 1 < d) {
          const Mask key = spans[s].first | (Mask{1} << idx);
          RowSpace grown = spans[s].second;
          grown.add(img);
          spans.emplace_back(key, std::move(grown));
        }
      }
      seq.points.push_back(std::move(*p));
      seq.images.push_back(std::move(img));
      accepted = true;
    }
    if (!accepted) {
      std::vector<std::vector<std::size_t>> blocking;
      for (const auto& [m, _] : blocked) blocking.push_back(mask_indices(m));
      throw SearchExhausted("no image outside the spans of fewer than " + std::to_string(d) +
                                " chosen images within " + std::to_string(budget) + " points after " +
                                std::to_string(seq.size()) + " accepted; f(X) may lie in finitely many proper subspaces",
                            seq.points, std::move(blocking));
    }
  }
  return seq;
}

/// b_I: the nullspace vector of the d-1 images indexed by I. By independence
/// b_I . f(c_i) = 0 exactly for i in I.
inline Vector subset_witness(const IndependenceSequence& seq, const std::vector<std::size_t>& indices) {
  if (indices.size() + 1 != seq.dim) {
    throw InvalidInput("subset witness needs exactly d-1 = " + std::to_string(seq.dim - 1) + " indices");
  }
  std::vector<Vector> rows;
  std::set<std::size_t> seen;
  for (std::size_t i : indices) {
    if (i >= seq.size()) throw InvalidInput("index " + std::to_string(i) + " outside the sequence");
    if (!seen.insert(i).second) throw InvalidInput("repeated index " + std::to_string(i));
    rows.push_back(seq.images[i]);
  }
  auto b = nullspace_witness(Matrix::from_rows(seq.field, seq.dim, rows));
  if (!b) throw Error("internal: d-1 images of an independence sequence span everything");
  return *b;
}

/// I' = I plus the padding indices n, n+1, ..., n + (d - |I| - 2).
inline std::vector<std::size_t> padded_indices(const std::vector<std::size_t>& subset, std::size_t n, std::size_t d) {
  if (subset.size() >= d) throw InvalidInput("subset must have fewer than d elements");
  std::vector<std::size_t> out = subset;
  for (std::size_t k = 0; k + subset.size() + 1 < d; ++k) out.push_back(n + k);
  return out;
}

inline Vector padded_subset_witness(const IndependenceSequence& seq, const std::vector<std::size_t>& subset,
                                    std::size_t n) {
  for (std::size_t i : subset) {
    if (i >= n) throw InvalidInput("subset index " + std::to_string(i) + " not below n = " + std::to_string(n));
  }
  return subset_witness(seq, padded_indices(subset, n, seq.dim));
}

inline std::size_t max_vc_trace_length(std::size_t n, std::size_t d) { return d <= 1 ? n : n + d - 1; }

struct MaxVcTrace {
  SetFamily family;
  Transcript transcript;
};

/// Every subset of [n] of size < d realized as a trace via b_{I'}.
inline MaxVcTrace max_vc_trace(const IndependenceSequence& seq, std::size_t n) {
  const std::size_t d = seq.dim;
  if (seq.size() < max_vc_trace_length(n, d)) {
    throw InvalidInput("sequence of length " + std::to_string(seq.size()) + " too short; need " +
                       std::to_string(max_vc_trace_length(n, d)));
  }
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back(point_label(seq.points[i]));
  MaxVcTrace out{SetFamily(GroundSet(std::move(labels))), {}};
  for (std::size_t k = 0; k < d && k <= n; ++k) {
    for_each_subset_of_size(n, k, [&](Mask s) {
      const auto subset = mask_indices(s);
      const Vector b = padded_subset_witness(seq, subset, n).canonical();
      std::string name = "b_{";
      for (std::size_t i = 0; i < subset.size(); ++i) name += (i ? "," : "") + std::to_string(subset[i]);
      name += "}";
      Mask trace = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const Scalar v = dot(b, seq.images[i]);
        const bool in = (s >> i) & 1;
        out.transcript.push_back(
            DotClaim{name, point_label(seq.points[i]), v, in ? DotClaim::Expect::zero : DotClaim::Expect::nonzero});
        if (v.is_zero()) trace |= Mask{1} << i;
      }
      if (trace != s) throw Error("internal: witness " + name + " realizes the wrong trace");
      out.family.insert(trace, b);
    });
  }
  return out;
}

/// Level k holds point k; leaf tau is labeled by its support when that set is
/// in the family (otherwise by set 0).
inline LabeledTree level_balanced_tree(const SetFamily& fam, std::size_t n) {
  if (n > fam.width()) throw InvalidInput("tree deeper than the ground set");
  if (fam.empty()) throw InvalidInput("cannot label leaves from an empty family");
  LabeledTree tree(n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < (std::size_t{1} << k); ++i) tree.set_node(k, i, k);
  for (std::size_t leaf = 0; leaf < tree.leaf_count(); ++leaf) {
    Mask support = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if ((leaf >> (n - 1 - k)) & 1) support |= Mask{1} << k;
    }
    tree.set_leaf(leaf, fam.index_of(support).value_or(0));
  }
  return tree;
}

inline Vector high_vcden_point(Field f, std::size_t d, std::size_t i, std::size_t j) {
  return plane_union_point(f, d, i, j);
}

/// b = (prod_k g(j_k)) e_0 - sum_l (prod_{k != l} g(j_k)) e_{l+1}, so that
/// c_{i,j} is a zero of b exactly when j = j_i. Returned unnormalized.
inline Vector high_vcden_witness(Field f, std::size_t d, const std::vector<std::size_t>& js) {
  if (d < 3) throw InvalidInput("the plane-union family needs d >= 3");
  if (js.size() + 1 != d) throw InvalidInput("witness needs d-1 indices");
  std::vector<Scalar> gains;
  for (std::size_t j : js) gains.push_back(plane_union_gain(f, j));
  Vector b(f, d);
  Scalar all(f, 1);
  for (const auto& g : gains) all *= g;
  b[0] = all;
  for (std::size_t l = 0; l < gains.size(); ++l) {
    Scalar others(f, 1);
    for (std::size_t k = 0; k < gains.size(); ++k) {
      if (k != l) others *= gains[k];
    }
    b[l + 1] = -others;
  }
  return b;
}

struct MaxLittlestoneTree {
  LabeledTree tree;
  SetFamily family;
  Sample sample;
};

/// Node sigma holds c_{|supp sigma|, |sigma|} while |supp sigma| < d-1 and
/// c_{0,n} afterwards; leaf tau holds Z_b for b = b_{j_0..j_{d-2}} with the
/// support of tau (first d-1 elements) padded by n.
inline MaxLittlestoneTree high_vcden_max_tree(Field f, std::size_t d, std::size_t n) {
  if (d < 3) throw InvalidInput("the plane-union family needs d >= 3");
  if (n > kDefaultDepthCap) throw ResourceLimit("tree depth " + std::to_string(n) + " above " + std::to_string(kDefaultDepthCap));
  const std::size_t points = (d - 1) * n + 1;
  if (points > kMaxWidth) throw ResourceLimit("tree needs " + std::to_string(points) + " points");
  plane_union_gain(f, n);

  const Instance inst = high_vcden(f, d);
  std::vector<Point> pts;
  auto slot = [&](std::size_t i, std::size_t k) { return k * (d - 1) + i; };
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i + 1 < d; ++i) pts.push_back(point_of(plane_union_point(f, d, i, k)));
  pts.push_back(point_of(plane_union_point(f, d, 0, n)));
  const std::size_t spare = pts.size() - 1;
  Sample sample = make_sample(inst, std::move(pts));

  MaxLittlestoneTree out{LabeledTree(n), SetFamily(sample.ground()), sample};
  for (std::size_t level = 0; level < n; ++level) {
    for (std::size_t idx = 0; idx < (std::size_t{1} << level); ++idx) {
      const auto ones = static_cast<std::size_t>(std::popcount(idx));
      out.tree.set_node(level, idx, ones + 1 < d ? slot(ones, level) : spare);
    }
  }
  for (std::size_t leaf = 0; leaf < out.tree.leaf_count(); ++leaf) {
    std::vector<std::size_t> js;
    for (std::size_t k = 0; k < n && js.size() + 1 < d; ++k) {
      if ((leaf >> (n - 1 - k)) & 1) js.push_back(k);
    }
    while (js.size() + 1 < d) js.push_back(n);
    const Vector b = high_vcden_witness(f, d, js).canonical();
    const Mask members = trace_of(sample, b);
    out.family.insert(members, b);
    out.tree.set_leaf(leaf, *out.family.index_of(members));
  }
  return out;
}

}  // namespace zsdim
