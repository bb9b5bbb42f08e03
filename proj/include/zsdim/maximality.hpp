#pragma once

// Span injectivity, minimal spanning reductions, the pigeonhole bound for
// image sets covered by finitely many proper subspaces, and the resulting
// non-maximality certificates.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "zsdim/constructions.hpp"
#include "zsdim/error.hpp"
#include "zsdim/exactalg.hpp"
#include "zsdim/setsystem.hpp"
#include "zsdim/zerosets.hpp"

namespace zsdim {

/// A collection of finite subsets of F^d.
struct SpanFamily {
  Field field = Field::rational();
  std::size_t dim = 1;
  std::vector<std::vector<Vector>> members;

  std::size_t size() const noexcept { return members.size(); }
};

inline std::vector<Vector> distinct_vectors(std::vector<Vector> vs) {
  std::sort(vs.begin(), vs.end());
  vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
  return vs;
}

/// {f(Z) : Z a trace} for an enumerated trace family.
inline SpanFamily image_family(const ZeroSetFamily& z) {
  SpanFamily out;
  out.dim = z.sample.images.empty() ? 1 : z.sample.images.front().size();
  if (!z.sample.images.empty()) out.field = z.sample.images.front().field();
  for (Mask m : z.family.sets()) {
    std::vector<Vector> member;
    for (std::size_t i = 0; i < z.sample.size(); ++i) {
      if ((m >> i) & 1) member.push_back(z.sample.images[i]);
    }
    out.members.push_back(distinct_vectors(std::move(member)));
  }
  return out;
}

namespace detail {

inline std::string span_key(const SpanFamily& fam, const std::vector<Vector>& member) {
  if (member.empty()) return "0";
  const Echelon e = reduced_row_echelon(Matrix::from_rows(fam.field, fam.dim, member));
  std::string key;
  for (std::size_t r = 0; r < e.pivot_cols.size(); ++r) key += e.reduced.row(r).str() + ";";
  return key.empty() ? "0" : key;
}

inline std::size_t span_rank(const SpanFamily& fam, const std::vector<Vector>& member) {
  return member.empty() ? 0 : rank(Matrix::from_rows(fam.field, fam.dim, member));
}

}  // namespace detail

struct SpanInjectivity {
  bool injective = true;
  /// A member whose span is all of F^d.
  std::optional<std::size_t> improper;
  /// Two distinct members with the same span.
  std::optional<std::pair<std::size_t, std::size_t>> collision;
};

inline SpanInjectivity span_injective(const SpanFamily& fam) {
  SpanInjectivity out;
  std::map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < fam.size(); ++i) {
    if (detail::span_rank(fam, fam.members[i]) == fam.dim) {
      out.injective = false;
      out.improper = i;
      return out;
    }
    auto [it, fresh] = seen.emplace(detail::span_key(fam, fam.members[i]), i);
    if (!fresh) {
      const auto& a = fam.members[it->second];
      const auto& b = fam.members[i];
      const bool equal_spans = a.empty() ? detail::span_rank(fam, b) == 0
                                         : (b.empty() ? detail::span_rank(fam, a) == 0 : same_span(a, b));
      if (!equal_spans) throw Error("internal: reduced echelon keys collide on different spans");
      if (distinct_vectors(a) != distinct_vectors(b)) {
        out.injective = false;
        out.collision = std::pair{it->second, i};
        return out;
      }
    }
  }
  return out;
}

/// Each member A replaced by a greedily chosen minimal I_A with the same span.
inline SpanFamily minimal_spanning_reduction(const SpanFamily& fam) {
  if (!span_injective(fam).injective) throw InvalidInput("minimal spanning reduction needs a span-injective family");
  SpanFamily out{fam.field, fam.dim, {}};
  for (const auto& member : fam.members) {
    RowSpace rs(fam.field, fam.dim);
    std::vector<Vector> kept;
    for (const auto& v : member) {
      if (rs.add(v)) kept.push_back(v);
    }
    out.members.push_back(std::move(kept));
  }
  return out;
}

/// Proper subspaces of F^d, each given by a spanning set.
struct CoverCertificate {
  Field field = Field::rational();
  std::size_t dim = 1;
  std::vector<std::vector<Vector>> subspaces;

  std::size_t k() const noexcept { return subspaces.size(); }

  void validate() const {
    if (subspaces.empty()) throw InvalidInput("cover certificate lists no subspaces");
    for (std::size_t i = 0; i < subspaces.size(); ++i) {
      for (const auto& v : subspaces[i]) {
        if (v.size() != dim || v.field() != field) {
          throw InvalidInput("cover subspace " + std::to_string(i) + " has a vector outside " + field.name() + "^" +
                             std::to_string(dim));
        }
      }
      const std::size_t r = subspaces[i].empty() ? 0 : rank(subspaces[i]);
      if (r >= dim) throw InvalidInput("cover subspace " + std::to_string(i) + " is not proper");
    }
  }

  std::optional<std::size_t> covering(const Vector& v) const {
    for (std::size_t i = 0; i < subspaces.size(); ++i) {
      if (in_span(v, subspaces[i])) return i;
    }
    return std::nullopt;
  }
};

/// d-1 coordinate planes span{e_0, e_{i+1}}, which contain the plane-union image.
inline CoverCertificate plane_union_cover(Field f, std::size_t d) {
  CoverCertificate c{f, d, {}};
  for (std::size_t i = 0; i + 1 < d; ++i) c.subspaces.push_back({Vector::unit(f, d, 0), Vector::unit(f, d, i + 1)});
  return c;
}

struct NotMaximalReport {
  std::size_t family_size = 0;
  std::uint64_t bound = 0;  // C(|S|, < d)
  bool strictly_below = false;
  /// A cover subspace holding at least d points of S, and those points.
  std::size_t crowded_subspace = 0;
  std::vector<std::size_t> crowded_points;
};

inline NotMaximalReport not_maximal_bound_check(const std::vector<Vector>& s, const CoverCertificate& cover,
                                                const SpanFamily& fam) {
  cover.validate();
  const std::size_t d = cover.dim;
  if (distinct_vectors(s).size() != s.size()) throw InvalidInput("S must consist of distinct vectors");
  if (s.size() <= cover.k() * (d - 1)) {
    throw InvalidInput("|S| = " + std::to_string(s.size()) + " does not exceed k(d-1) = " +
                       std::to_string(cover.k() * (d - 1)));
  }
  std::vector<std::vector<std::size_t>> per_subspace(cover.k());
  for (std::size_t i = 0; i < s.size(); ++i) {
    bool covered = false;
    for (std::size_t j = 0; j < cover.k(); ++j) {
      if (in_span(s[i], cover.subspaces[j])) {
        per_subspace[j].push_back(i);
        covered = true;
      }
    }
    if (!covered) throw InvalidInput("vector " + s[i].str() + " of S lies in no cover subspace");
  }
  if (fam.dim != d || fam.field != cover.field) throw InvalidInput("family and cover live in different spaces");
  const auto inj = span_injective(fam);
  if (!inj.injective) throw InvalidInput("family is not span injective");
  for (const auto& member : fam.members) {
    for (const auto& v : member) {
      if (std::find(s.begin(), s.end(), v) == s.end()) throw InvalidInput("family member " + v.str() + " is not in S");
    }
  }
  NotMaximalReport rep;
  rep.family_size = fam.size();
  rep.bound = binom_le(s.size(), static_cast<long long>(d) - 1);
  rep.strictly_below = rep.family_size < rep.bound;
  for (std::size_t j = 0; j < cover.k(); ++j) {
    if (per_subspace[j].size() >= d) {
      rep.crowded_subspace = j;
      rep.crowded_points = per_subspace[j];
      break;
    }
  }
  if (rep.crowded_points.empty()) throw Error("internal: pigeonhole found no crowded subspace");
  return rep;
}

struct NonMaximalityVerdict {
  enum class Status { certified, refuted };
  Status status = Status::refuted;
  std::size_t n = 0;             // k(d-1) + 1
  std::size_t scanned = 0;       // stream points checked against the cover
  std::vector<Point> sample;     // X_0
  std::size_t trace_count = 0;
  std::uint64_t bound = 0;       // C(n, < d)
  std::optional<Point> escaping_point;
  std::optional<Vector> escaping_image;
  std::optional<NotMaximalReport> pigeonhole;
  std::optional<ZeroSetFamily> family;
};

/// Validates the cover on up to sample_budget stream points, then shows the
/// trace on the first n = k(d-1)+1 points has fewer than C(n, < d) sets.
inline NonMaximalityVerdict non_maximality_certificate(const Instance& inst, const CoverCertificate& cover,
                                                       std::size_t sample_budget) {
  cover.validate();
  if (cover.dim != inst.dim || cover.field != inst.field) throw InvalidInput("cover does not live in the instance's F^d");
  const std::size_t d = inst.dim;
  if (d < 2) throw InvalidInput("non-maximality needs d >= 2");
  NonMaximalityVerdict v;
  v.n = cover.k() * (d - 1) + 1;
  if (v.n > kGroundSoftLimit) throw ResourceLimit("certificate sample of " + std::to_string(v.n) + " points too large");
  v.bound = binom_le(v.n, static_cast<long long>(d) - 1);

  auto next = inst.stream.open();
  std::vector<Point> x0;
  while (v.scanned < std::max(sample_budget, v.n)) {
    auto p = next();
    if (!p) break;
    ++v.scanned;
    Vector img = inst.image(*p);
    if (!cover.covering(img)) {
      v.status = NonMaximalityVerdict::Status::refuted;
      v.escaping_point = std::move(*p);
      v.escaping_image = std::move(img);
      return v;
    }
    if (x0.size() < v.n) x0.push_back(std::move(*p));
  }
  if (x0.size() < v.n) {
    throw InvalidInput("X has fewer than n = " + std::to_string(v.n) + " points");
  }
  v.sample = x0;
  ZeroSetFamily z = enumerate_family(inst, make_sample(inst, std::move(x0)));
  v.trace_count = z.family.size();
  const SpanFamily images = image_family(z);
  std::vector<Vector> s = distinct_vectors(z.sample.images);
  if (s.size() > cover.k() * (d - 1)) v.pigeonhole = not_maximal_bound_check(s, cover, images);
  v.status = v.trace_count < v.bound ? NonMaximalityVerdict::Status::certified : NonMaximalityVerdict::Status::refuted;
  v.family = std::move(z);
  return v;
}

/// Exactly one side should hold: (a) independence sequences reach every tested
/// n with max_vc_trace realizing C(n, < d) sets, or (b) a cover certificate
/// validates and the trace at n = k(d-1)+1 is too small.
struct DichotomyReport {
  bool maximal_side = false;
  bool cover_side = false;
  std::vector<std::pair<std::size_t, std::size_t>> trace_counts;  // (n, |trace|) on side (a)
  std::string maximal_failure;
  std::optional<NonMaximalityVerdict> cover_verdict;

  bool exactly_one() const noexcept { return maximal_side != cover_side; }
};

inline DichotomyReport maximality_dichotomy(const Instance& inst, const std::optional<CoverCertificate>& cover,
                                            std::size_t n_max, std::size_t budget = kDefaultScanBudget) {
  DichotomyReport rep;
  const std::size_t d = inst.dim;
  try {
    const IndependenceSequence seq = independence_sequence(inst, max_vc_trace_length(n_max, d), budget);
    rep.maximal_side = true;
    for (std::size_t n = 1; n <= n_max; ++n) {
      const std::size_t count = max_vc_trace(seq, n).family.size();
      rep.trace_counts.emplace_back(n, count);
      if (count != binom_le(n, static_cast<long long>(d) - 1)) rep.maximal_side = false;
    }
  } catch (const SearchExhausted& e) {
    rep.maximal_failure = e.what();
  }
  if (cover) {
    rep.cover_verdict = non_maximality_certificate(inst, *cover, budget);
    rep.cover_side = rep.cover_verdict->status == NonMaximalityVerdict::Status::certified;
  }
  return rep;
}

}  // namespace zsdim
