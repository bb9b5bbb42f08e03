#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "zsdim/constructions.hpp"
#include "zsdim/io.hpp"
#include "zsdim/littlestone.hpp"
#include "zsdim/maximality.hpp"
#include "zsdim/setsystem.hpp"
#include "zsdim/zerosets.hpp"

using namespace zsdim;

namespace {

const Field Q = Field::rational();

Instance preset(const std::string& name) { return io::instance_from_json(io::preset_instance(name)); }

// Dual-basis points followed by the next two unused stream points.
Sample construction_sample(const Instance& inst) {
  const DualBasis db = dual_basis(inst);
  std::vector<Point> pts = db.points;
  auto next = inst.stream.open();
  std::size_t added = 0;
  while (added < 2) {
    auto p = next();
    if (!p) break;
    if (std::find(pts.begin(), pts.end(), *p) != pts.end()) continue;
    pts.push_back(*p);
    ++added;
  }
  return make_sample(inst, pts);
}

std::vector<Instance> independent_builtins() {
  std::vector<Instance> out;
  for (std::size_t d = 2; d <= 5; ++d) out.push_back(moment_curve(Q, d));
  out.push_back(preset("affine_f3"));
  out.push_back(conics(Q));
  out.push_back(ellipse_carrier(Q));
  return out;
}

bool criterion_dimensions(std::string& note) {
  bool ok = true;
  for (const auto& inst : independent_builtins()) {
    const auto z = enumerate_family(inst, construction_sample(inst));
    const int vc = vcdim(z.family).value();
    const int ld = ldim(z.family).value();
    const int target = static_cast<int>(inst.dim) - 1;
    const int ovc = oracle::vcdim(z.family);
    const int old = oracle::ldim(z.family.sets(), z.family.width());
    note += inst.name + ":" + std::to_string(vc) + "/" + std::to_string(ld) + " ";
    ok = ok && vc == target && ld == target && ovc == target && old == target;
  }
  return ok;
}

bool criterion_pi_d(std::string& note) {
  bool ok = true;
  for (const auto& inst : independent_builtins()) {
    if (inst.dim > 5) continue;
    const auto z = enumerate_family(inst, construction_sample(inst));
    const auto p = pi(z.family, inst.dim);
    note += inst.name + ":" + std::to_string(p) + " ";
    ok = ok && p == (std::uint64_t{1} << inst.dim) - 1 && oracle::pi(z.family, inst.dim) == p;
  }
  return ok;
}

bool criterion_moment_maximal(std::string& note) {
  const Instance mc = moment_curve(Q, 3);
  const auto z8 = enumerate_family(mc, stream_sample(mc, 8));
  LittlestoneSearch search(z8.family);
  bool ok = true;
  for (std::size_t n = 3; n <= 8; ++n) {
    const auto target = oracle::binom_le(n, 2);
    const auto trace = enumerate_family(mc, stream_sample(mc, n)).family.size();
    const auto p = pi(z8.family, n);
    const auto r = search.rho(n);
    ok = ok && trace == target && p == target && r == target && oracle::pi(z8.family, n) == target;
    if (n <= 3) {
      const auto z3 = enumerate_family(mc, stream_sample(mc, n));
      ok = ok && rho_via_trees(z3.family, n) == target;
    }
    note += std::to_string(n) + ":" + std::to_string(trace) + "/" + std::to_string(p) + "/" + std::to_string(r) + " ";
  }
  return ok;
}

bool criterion_plane_union(std::string& note) {
  bool grid = true;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      for (std::size_t j0 = 0; j0 < 4; ++j0)
        for (std::size_t j1 = 0; j1 < 4; ++j1) {
          const Vector b = high_vcden_witness(Q, 3, {j0, j1});
          const bool member = dot(b, high_vcden_point(Q, 3, i, j)).is_zero();
          grid = grid && member == (j == (i == 0 ? j0 : j1));
        }
  const Instance hv = high_vcden(Q, 3);
  std::vector<Point> grid_points;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 4; ++j) grid_points.push_back(point_of(high_vcden_point(Q, 3, i, j)));
  const auto z = enumerate_family(hv, make_sample(hv, grid_points));
  const bool lower = z.family.size() >= 16;
  const auto cert = non_maximality_certificate(hv, plane_union_cover(Q, 3), kDefaultScanBudget);
  const bool certified = cert.status == NonMaximalityVerdict::Status::certified && cert.n == 5 &&
                         cert.trace_count < 16 && cert.bound == 16;
  bool trees = true;
  for (std::size_t n = 3; n <= 5; ++n) {
    const auto t = high_vcden_max_tree(Q, 3, n);
    trees = trees && count_well_labeled(t.tree, t.family) == oracle::binom_le(n, 2);
  }
  note = "grid=" + std::to_string(grid) + " traces8=" + std::to_string(z.family.size()) +
         " cert_traces=" + std::to_string(cert.trace_count) + " trees=" + std::to_string(trees);
  return grid && lower && certified && trees;
}

bool criterion_density_zero(std::string& note) {
  const Instance inst = preset("two_lines");
  const Sample s = stream_sample(inst, 6);
  const auto rep = density_zero_partition(inst, s, {{Vector::of(Q, {1, 0})}, {Vector::of(Q, {0, 1})}});
  // Independent union check: every trace is a union of the blocks it meets.
  bool unions = true;
  for (Mask t : rep.family.family.sets()) {
    Mask rebuilt = 0;
    for (Mask b : rep.blocks)
      if (t & b) rebuilt |= b;
    if (t & rep.zero_block) rebuilt |= rep.zero_block;
    unions = unions && rebuilt == t;
  }
  note = "size=" + std::to_string(rep.family.family.size()) + " blocks=" + std::to_string(rep.blocks.size());
  return rep.blocks.size() == 2 && rep.family.family.size() <= 4 && unions && rep.traces_are_block_unions;
}

bool criterion_random_oracles(std::string& note) {
  std::mt19937_64 rng(20240607);
  std::uniform_int_distribution<std::size_t> width_dist(0, 6), count_dist(0, 12);
  std::size_t violations = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t width = width_dist(rng);
    std::uniform_int_distribution<Mask> set_dist(0, low_bits(width));
    SetFamily fam{GroundSet(width)};
    const std::size_t target = count_dist(rng);
    for (std::size_t i = 0; i < target; ++i) fam.insert(set_dist(rng));
    const Dim vc = vcdim(fam), ld = ldim(fam);
    if (vc != vcdim_via_trees(fam)) ++violations;
    if ((vc.is_neg_infinity() ? -1 : vc.value()) != oracle::vcdim(fam)) ++violations;
    if ((ld.is_neg_infinity() ? -1 : ld.value()) != oracle::ldim(fam.sets(), fam.width())) ++violations;
    if (!(vc <= ld)) ++violations;
    LittlestoneSearch search(fam);
    for (std::size_t n = 0; n <= fam.width(); ++n) {
      const auto p = pi(fam, n), r = search.rho(n);
      if (p != oracle::pi(fam, n) || p > r) ++violations;
      if (n <= 3 && r != rho_via_trees(fam, n)) ++violations;
      if (!vc.is_neg_infinity() && p > oracle::binom_le(n, vc.value())) ++violations;
      if (!ld.is_neg_infinity() && r > oracle::binom_le(n, ld.value())) ++violations;
    }
  }
  note = "violations=" + std::to_string(violations);
  return violations == 0;
}

bool criterion_enumerators(std::string& note) {
  bool ok = true;
  std::size_t compared = 0;
  for (std::uint64_t p : {3, 5}) {
    const Field f = Field::prime(p);
    std::vector<Instance> insts{moment_curve(f, 2), moment_curve(f, 3), preset("affine_f3"),
                                polynomial_instance("(x, x^2)", f, {"x"}, {"x", "x^2"}),
                                polynomial_instance("(1, x, y)", f, {"x", "y"}, {"1", "x", "y"}),
                                polynomial_instance("(1, x, x*y)", f, {"x", "y"}, {"1", "x", "x*y"})};
    for (const auto& inst : insts) {
      if (inst.field != f) continue;
      const std::size_t n = std::min<std::size_t>(6, inst.stream.prefix(6).size());
      const Sample s = stream_sample(inst, n);
      const auto a = enumerate_family_flats(inst, s).family.canonical();
      const auto b = enumerate_family_bruteforce(inst, s).family.canonical();
      ok = ok && a == b;
      ++compared;
    }
  }
  note = "instances=" + std::to_string(compared);
  return ok;
}

bool criterion_span_suite(std::string& note) {
  bool inj = true, reduced = true, strict = true;
  for (const char* name : {"moment_curve:3", "conics", "ellipse", "high_vcden:3", "two_lines", "x_2x"}) {
    const Instance inst = preset(name);
    const auto z = enumerate_family(inst, stream_sample(inst, inst.stream.prefix(7).size()));
    const SpanFamily img = image_family(z);
    inj = inj && span_injective(img).injective;
    const SpanFamily red = minimal_spanning_reduction(img);
    reduced = reduced && red.size() == img.size();
    for (const auto& m : red.members) {
      oracle::QMatrix rows;
      for (const auto& v : m) {
        std::vector<mpq_class> row;
        for (std::size_t i = 0; i < v.size(); ++i) row.push_back(v[i].rational());
        rows.push_back(row);
      }
      reduced = reduced && m.size() < inst.dim && oracle::rank_by_minors(rows) == m.size();
    }
  }
  const Instance hv = high_vcden(Q, 3);
  for (std::size_t planes = 2; planes <= 3; ++planes) {
    CoverCertificate cover = plane_union_cover(Q, 3);
    if (planes == 3) cover.subspaces.push_back({Vector::unit(Q, 3, 1), Vector::unit(Q, 3, 2)});
    for (std::size_t n = 5; n <= 7; ++n) {
      const auto z = enumerate_family(hv, stream_sample(hv, n));
      const auto s = distinct_vectors(z.sample.images);
      if (s.size() <= cover.k() * 2) continue;
      const auto rep = not_maximal_bound_check(s, cover, image_family(z));
      strict = strict && rep.strictly_below && rep.family_size < oracle::binom_le(s.size(), 2);
    }
  }
  note = "injective=" + std::to_string(inj) + " reduction=" + std::to_string(reduced) +
         " strict=" + std::to_string(strict);
  return inj && reduced && strict;
}

bool criterion_negative_controls(std::string& note) {
  const Instance x2 = preset("x_2x");
  const auto c = independence_conditions(x2, kDefaultScanBudget);
  const auto v = linearly_independent(x2, kDefaultScanBudget);
  const bool x2_ok = c.consistent() && c.functions_independent == false && c.no_vanishing_combination == false &&
                     c.image_spans == false && v.kind == IndependenceVerdict::Kind::dependent;
  const Instance x3 = preset("x_x3_f3");
  const auto c3 = independence_conditions(x3, kDefaultScanBudget);
  const auto v3 = linearly_independent(x3, kDefaultScanBudget);
  // x^3 = x on F_3, checked with plain modular arithmetic.
  bool fermat = true;
  for (std::uint64_t x = 0; x < 3; ++x) fermat = fermat && oracle::mod_mul(oracle::mod_mul(x, x, 3), x, 3) == x;
  const bool x3_ok = v3.kind == IndependenceVerdict::Kind::dependent && c3.consistent() &&
                     c3.functions_independent == false && fermat;
  note = "x_2x=" + std::to_string(x2_ok) + " x_x3_f3=" + std::to_string(x3_ok);
  return x2_ok && x3_ok;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<bool(std::string&)> run;
  };
  const std::vector<Criterion> criteria{
      {"1 vcdim = ldim = d-1 on built-ins", criterion_dimensions},
      {"2 pi(d) = 2^d - 1", criterion_pi_d},
      {"3 moment curve d=3 maximal for n = 3..8", criterion_moment_maximal},
      {"4 plane-union grid, lower bound, certificate, trees", criterion_plane_union},
      {"5 image in two lines: |C_f| <= 4 and block unions", criterion_density_zero},
      {"6 random family oracles and bounds", criterion_random_oracles},
      {"7 flat lattice = brute force on F_3, F_5", criterion_enumerators},
      {"8 span injectivity, reduction, strict bound", criterion_span_suite},
      {"9 negative controls", criterion_negative_controls},
  };
  int failures = 0;
  const auto start = std::chrono::steady_clock::now();
  for (const auto& c : criteria) {
    std::string note;
    bool ok = false;
    try {
      ok = c.run(note);
    } catch (const std::exception& e) {
      note = std::string("exception: ") + e.what();
    }
    std::printf("%s criterion %s (%s)\n", ok ? "PASS" : "FAIL", c.name, note.c_str());
    if (!ok) ++failures;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%zu criteria, %d failed, %.2f s\n", criteria.size(), failures, secs);
  return failures == 0 ? 0 : 1;
}
