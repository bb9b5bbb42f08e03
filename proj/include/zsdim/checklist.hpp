#pragma once

// The verify-paper checklist: one group of assertions per result, run on the
// built-in instances (or on a single user instance).

#include <nlohmann/json.hpp>

#include <random>
#include <string>
#include <vector>

#include "zsdim/commands.hpp"
#include "zsdim/constructions.hpp"
#include "zsdim/io.hpp"
#include "zsdim/littlestone.hpp"
#include "zsdim/maximality.hpp"
#include "zsdim/setsystem.hpp"
#include "zsdim/zerosets.hpp"

namespace zsdim::cli {

struct NamedInstance {
  std::string preset;
  Instance inst;
};

inline NamedInstance named(const std::string& preset) {
  return NamedInstance{preset, io::instance_from_json(io::preset_instance(preset))};
}

/// Dual-basis points plus two further stream points, and the trace family there.
inline ZeroSetFamily construction_family(const Instance& inst, std::size_t budget) {
  const DualBasis db = dual_basis(inst, budget);
  return enumerate_family(inst, make_sample(inst, detail::extend_from_stream(inst, db.points, 2)));
}

/// A random family on at most 6 points with at most 12 sets.
inline SetFamily random_family(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> width_dist(0, 6);
  const std::size_t width = width_dist(rng);
  std::uniform_int_distribution<std::size_t> count_dist(0, 12);
  std::uniform_int_distribution<Mask> set_dist(0, low_bits(width));
  SetFamily fam{GroundSet(width)};
  const std::size_t target = count_dist(rng);
  for (std::size_t i = 0; i < target; ++i) fam.insert(set_dist(rng));
  return fam;
}

inline void instance_checks(Report& r, const Instance& inst, std::size_t budget) {
  const std::string tag = " [" + inst.name + "]";
  const IndependenceVerdict v = linearly_independent(inst, std::max(budget, inst.dim));
  const IndependenceConditions c = independence_conditions(inst, budget);
  r.check("linearly independent" + tag, "zerosets.linearly_independent",
          v.kind == IndependenceVerdict::Kind::independent, verdict_to_json(v));
  r.check("all three independence conditions hold" + tag, "zerosets.independence_conditions",
          c.functions_independent == true && c.no_vanishing_combination == true && c.image_spans == true,
          conditions_to_json(c));
  if (v.kind != IndependenceVerdict::Kind::independent) return;
  const DualBasis db = dual_basis(inst, budget);
  r.check("dual basis Kronecker property" + tag, "constructions.dual_basis", db.kronecker_holds());
  const ShatteredSet sh = shattered_set(db);
  r.check("c_0..c_{d-2} shattered" + tag, "constructions.shattered_set",
          transcript_holds(sh.transcript) && shatters(sh.family, sh.family.ground().full()));
  const ZeroSetFamily z = construction_family(inst, budget);
  const Dim vc = vcdim(z.family), ld = ldim(z.family);
  const Dim target = Dim::of(static_cast<int>(inst.dim) - 1);
  r.check("vcdim = ldim = d-1" + tag, "setsystem.vcdim, littlestone.ldim", vc == target && ld == target,
          {{"vcdim", vc.str()}, {"ldim", ld.str()}, {"d", inst.dim}});
  if (inst.dim <= 5) {
    const auto p = pi(z.family, inst.dim);
    r.check("pi(d) = 2^d - 1" + tag, "setsystem.pi", p == (std::uint64_t{1} << inst.dim) - 1, {{"pi_d", p}});
  }
}

inline void paper_checklist(Report& r, const RunConfig& cfg) {
  const std::size_t budget = cfg.budget;
  const Field Q = Field::rational();

  // Equivalent independence conditions, positive and negative instances.
  for (const char* p : {"moment_curve:3", "conics", "ellipse", "affine_f3"}) {
    const auto ni = named(p);
    const auto c = independence_conditions(ni.inst, budget);
    const auto v = linearly_independent(ni.inst, budget);
    r.check(std::string("independence conditions all true [") + p + "]", "zerosets.independence_conditions",
            c.consistent() && c.image_spans == true && v.kind == IndependenceVerdict::Kind::independent,
            conditions_to_json(c));
  }
  for (const char* p : {"x_2x", "x_x3_f3"}) {
    const auto ni = named(p);
    const auto c = independence_conditions(ni.inst, budget);
    const auto v = linearly_independent(ni.inst, budget);
    r.check(std::string("negative control fails all conditions consistently [") + p + "]",
            "zerosets.independence_conditions",
            c.consistent() && c.functions_independent == false && c.no_vanishing_combination == false &&
                c.image_spans == false && v.kind == IndependenceVerdict::Kind::dependent,
            conditions_to_json(c));
  }

  // Dual basis, shattering, dimension equalities, pi(d).
  for (std::size_t d = 2; d <= 5; ++d) instance_checks(r, moment_curve(Q, d), budget);
  instance_checks(r, named("affine_f3").inst, budget);
  instance_checks(r, conics(Q), budget);
  instance_checks(r, ellipse_carrier(Q), budget);

  // Density zero: image inside two lines.
  {
    const auto ni = named("two_lines");
    const Sample s = stream_sample(ni.inst, 6);
    const auto rep = density_zero_partition(ni.inst, s, {{Vector::of(Q, {1, 0})}, {Vector::of(Q, {0, 1})}});
    r.check("|C_f| <= 2^k with traces unions of blocks [two_lines]", "zerosets.density_zero_partition",
            rep.within_bound && rep.traces_are_block_unions, {{"size", rep.family_size}, {"bound", rep.bound}});
  }

  // Maximal VC counts and the level-balanced tree over the same points.
  {
    const Instance mc = moment_curve(Q, 3);
    const auto seq = independence_sequence(mc, max_vc_trace_length(8, 3), budget);
    const Sample s = stream_sample(mc, 8);
    const ZeroSetFamily z = enumerate_family(mc, s);
    LittlestoneSearch search(z.family);
    bool ok = true;
    json rows = json::array();
    for (std::size_t n = 3; n <= 8; ++n) {
      const auto target = binom_le(n, 2);
      const auto mt = max_vc_trace(seq, n);
      const auto trace = enumerate_family(mc, stream_sample(mc, n)).family.size();
      const auto p = pi(z.family, n);
      const auto rh = search.rho(n);
      const auto tree = level_balanced_tree(mt.family, n);
      const auto leaves = count_well_labeled(tree, mt.family);
      ok = ok && mt.family.size() == target && trace == target && p == target && rh == target && leaves == target &&
           transcript_holds(mt.transcript);
      rows.push_back({{"n", n}, {"max_vc_trace", mt.family.size()}, {"trace", trace}, {"pi", p}, {"rho", rh},
                      {"tree_leaves", leaves}, {"target", target}});
    }
    r.check("moment curve d=3 is maximal for n = 3..8", "constructions.max_vc_trace, littlestone.rho", ok, rows);
  }

  // Plane-union family: trace grid, lower bound n^{d-1}, explicit tree.
  {
    bool grid = true;
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 4; ++j)
        for (std::size_t j0 = 0; j0 < 4; ++j0)
          for (std::size_t j1 = 0; j1 < 4; ++j1) {
            const bool member = dot(high_vcden_witness(Q, 3, {j0, j1}), high_vcden_point(Q, 3, i, j)).is_zero();
            grid = grid && member == (j == (i == 0 ? j0 : j1));
          }
    r.check("c_{i,j} in Z_b iff j = j_i", "constructions.high_vcden_witness", grid);
    const Instance hv = high_vcden(Q, 3);
    json counts = json::array();
    bool lower = true;
    for (std::size_t m = 2; m <= 4; ++m) {
      const auto c = enumerate_family(hv, stream_sample(hv, 2 * m)).family.size();
      counts.push_back({{"m", m}, {"points", 2 * m}, {"traces", c}, {"m^2", m * m}});
      lower = lower && c >= m * m;
    }
    r.check("trace count on 2m plane-union points >= m^2", "zerosets.enumerate_family", lower, counts);
    bool tree_ok = true;
    json leaves = json::array();
    for (std::size_t n = 3; n <= 6; ++n) {
      const auto t = high_vcden_max_tree(Q, 3, n);
      const auto c = count_well_labeled(t.tree, t.family);
      leaves.push_back({{"n", n}, {"well_labeled", c}});
      tree_ok = tree_ok && c == binom_le(n, 2);
    }
    r.check("explicit tree has C(n, <= 2) well-labeled leaves", "constructions.high_vcden_max_tree", tree_ok, leaves);
    const auto t6 = high_vcden_max_tree(Q, 3, 6);
    const std::size_t leaf = LabeledTree::path_index("001001");
    std::vector<std::string> path;
    for (std::size_t k = 0; k < 6; ++k) path.push_back(t6.sample.ground().label(t6.tree.node(k, leaf >> (6 - k))));
    const std::vector<std::string> expected{"(1,1,0)", "(1,2,0)", "(1,3,0)", "(1,0,4)", "(1,0,5)", "(1,0,6)"};
    const Vector b25 = high_vcden_witness(Q, 3, {2, 5}).canonical();
    r.check("path 001001 visits c00 c01 c02 c13 c14 c15 and ends at Z_{b_{2,5}}", "constructions.high_vcden_max_tree",
            path == expected && *t6.family.witness(t6.tree.leaf(leaf)) == b25 && leaf_well_labeled(t6.tree, t6.family, leaf),
            {{"path", path}, {"leaf_witness", io::to_json(*t6.family.witness(t6.tree.leaf(leaf)))}});
    const auto cert = non_maximality_certificate(hv, plane_union_cover(Q, 3), budget);
    r.check("plane-union family certified not VC-maximal at n = 5", "maximality.non_maximality_certificate",
            cert.status == NonMaximalityVerdict::Status::certified && cert.trace_count < 16,
            {{"trace_count", cert.trace_count}, {"bound", cert.bound}});
  }

  // Span injectivity and minimal spanning reductions on enumerated image families.
  {
    bool inj = true, reduced = true;
    json sizes = json::array();
    auto run = [&](const Instance& inst, const Sample& s) {
      const auto z = enumerate_family(inst, s);
      const SpanFamily img = image_family(z);
      inj = inj && span_injective(img).injective;
      const SpanFamily red = minimal_spanning_reduction(img);
      reduced = reduced && red.size() == img.size() && span_injective(red).injective;
      for (const auto& m : red.members) reduced = reduced && m.size() < inst.dim && rank(m) == m.size();
      sizes.push_back({{"instance", inst.name}, {"members", img.size()}});
    };
    for (const char* p : {"moment_curve:3", "conics", "ellipse", "high_vcden:3", "two_lines", "x_2x"}) {
      const auto ni = named(p);
      run(ni.inst, stream_sample(ni.inst, ni.inst.stream.prefix(7).size()));
    }
    const auto f5 = moment_curve(Field::prime(5), 3);
    run(f5, stream_sample(f5, 5));
    r.check("image families are span injective", "maximality.span_injective", inj, sizes);
    r.check("minimal spanning reduction keeps cardinality and independence", "maximality.minimal_spanning_reduction",
            reduced);
  }

  // Pigeonhole bound on covered samples.
  {
    const Instance hv = high_vcden(Q, 3);
    bool ok = true;
    json reps = json::array();
    for (std::size_t extra = 0; extra < 2; ++extra) {
      CoverCertificate cover = plane_union_cover(Q, 3);
      if (extra) cover.subspaces.push_back({Vector::unit(Q, 3, 1), Vector::unit(Q, 3, 2)});
      const auto z = enumerate_family(hv, stream_sample(hv, 7));
      const auto rep = not_maximal_bound_check(distinct_vectors(z.sample.images), cover, image_family(z));
      ok = ok && rep.strictly_below;
      reps.push_back({{"k", cover.k()}, {"family", rep.family_size}, {"bound", rep.bound}});
    }
    const auto x2 = named("x_2x");
    const CoverCertificate line{Q, 2, {{Vector::of(Q, {1, 2})}}};
    const auto cert = non_maximality_certificate(x2.inst, line, budget);
    ok = ok && cert.status == NonMaximalityVerdict::Status::certified;
    reps.push_back({{"instance", "x_2x"}, {"trace_count", cert.trace_count}, {"bound", cert.bound}});
    r.check("covered samples have fewer than C(|S|, < d) traces", "maximality.not_maximal_bound_check", ok, reps);
    const CoverCertificate conic_claim{Q, 6, {{Vector::unit(Q, 6, 5)}, {Vector::unit(Q, 6, 0), Vector::unit(Q, 6, 3)}}};
    const auto refuted = non_maximality_certificate(conics(Q), conic_claim, budget);
    r.check("a claimed cover of the conic images is refuted", "maximality.non_maximality_certificate",
            refuted.status == NonMaximalityVerdict::Status::refuted && refuted.escaping_point.has_value());
  }

  // Dichotomy on built-ins.
  {
    struct Case {
      const char* preset;
      std::optional<CoverCertificate> cover;
      bool expect_maximal;
    };
    const std::vector<Case> cases{{"moment_curve:3", std::nullopt, true},
                                  {"moment_curve:4", std::nullopt, true},
                                  {"conics", std::nullopt, true},
                                  {"ellipse", std::nullopt, true},
                                  {"high_vcden:3", plane_union_cover(Q, 3), false},
                                  {"high_vcden:4", plane_union_cover(Q, 4), false},
                                  {"x_2x", CoverCertificate{Q, 2, {{Vector::of(Q, {1, 2})}}}, false}};
    bool ok = true;
    json rows = json::array();
    for (const auto& c : cases) {
      const auto ni = named(c.preset);
      const auto rep = maximality_dichotomy(ni.inst, c.cover, 5, std::min<std::size_t>(budget, 2000));
      ok = ok && rep.exactly_one() && rep.maximal_side == c.expect_maximal;
      rows.push_back({{"instance", c.preset}, {"maximal_side", rep.maximal_side}, {"cover_side", rep.cover_side}});
    }
    r.check("exactly one side of the maximality dichotomy holds", "maximality.maximality_dichotomy", ok, rows);
  }

  // Enumerator equivalence on small prime fields.
  {
    bool ok = true;
    json rows = json::array();
    for (std::uint64_t p : {3, 5}) {
      const Field f = Field::prime(p);
      std::vector<Instance> insts{moment_curve(f, 2), moment_curve(f, 3),
                                  polynomial_instance("(x, x^2)", f, {"x"}, {"x", "x^2"}),
                                  polynomial_instance("(1, x, x*y)", f, {"x", "y"}, {"1", "x", "x*y"})};
      for (const auto& inst : insts) {
        const Sample s = stream_sample(inst, std::min<std::size_t>(6, inst.stream.prefix(6).size()));
        const bool same = enumerate_family_flats(inst, s).family.same_sets(enumerate_family_bruteforce(inst, s).family);
        ok = ok && same;
        rows.push_back({{"instance", inst.name}, {"same", same}});
      }
    }
    r.check("flat lattice and brute force agree", "zerosets.enumerate_family_flats", ok, rows);
  }

  // Mutual oracles on seeded random families.
  {
    std::mt19937_64 rng(cfg.seed);
    std::size_t violations = 0;
    for (int trial = 0; trial < 200; ++trial) {
      const SetFamily fam = random_family(rng);
      const Dim vc = vcdim(fam), ld = ldim(fam);
      if (vc != vcdim_via_trees(fam) || !(vc <= ld)) ++violations;
      LittlestoneSearch search(fam);
      for (std::size_t n = 0; n <= std::min<std::size_t>(3, fam.width()); ++n) {
        const auto rh = search.rho(n), p = pi(fam, n);
        if (rh != rho_via_trees(fam, n) || p > rh) ++violations;
        if (!vc.is_neg_infinity() && p > binom_le(n, vc.value())) ++violations;
        if (!ld.is_neg_infinity() && rh > binom_le(n, ld.value())) ++violations;
      }
    }
    r.check("random families: tree oracles and bounds agree", "setsystem.vcdim_via_trees, littlestone.rho_via_trees",
            violations == 0, {{"seed", cfg.seed}, {"violations", violations}});
  }
}

inline Report cmd_verify_paper(const RunConfig& cfg) {
  Report r{"verify-paper", cfg.echo()};
  Stopwatch t(r, "total");
  if (cfg.instance_given) {
    const json spec = cfg.instance.is_string() ? resolve_instance_arg(cfg.instance.get<std::string>()) : cfg.instance;
    instance_checks(r, io::instance_from_json(spec), cfg.budget);
  } else {
    paper_checklist(r, cfg);
  }
  r.results["checks_run"] = r.checks.size();
  return r;
}

}  // namespace zsdim::cli
