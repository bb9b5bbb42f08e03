#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "zsdim/littlestone.hpp"

using namespace zsdim;

namespace {

SetFamily family(std::size_t width, std::initializer_list<Mask> sets) {
  SetFamily fam{GroundSet(width)};
  for (Mask m : sets) fam.insert(m);
  return fam;
}

}  // namespace

TEST(TreePaths, MsbFirstStrings) {
  EXPECT_EQ(LabeledTree::path(6, 9), "001001");
  EXPECT_EQ(LabeledTree::path_index("001001"), 9u);
  EXPECT_EQ(LabeledTree::path(0, 0), "");
}

TEST(Tree, SingleNodeLabelling) {
  const SetFamily fam = family(2, {0b00, 0b01});
  LabeledTree t(1);
  t.set_node(0, 0, 0);
  t.set_leaf(0, 0);  // branch 0: point 0 not in {}
  t.set_leaf(1, 1);  // branch 1: point 0 in {0}
  EXPECT_TRUE(leaf_well_labeled(t, fam, "0"));
  EXPECT_TRUE(leaf_well_labeled(t, fam, "1"));
  EXPECT_EQ(count_well_labeled(t, fam), 2u);
  t.set_leaf(1, 0);
  EXPECT_EQ(count_well_labeled(t, fam), 1u);
}

TEST(Tree, RejectsPartialLabelling) {
  EXPECT_THROW(LabeledTree(2, {0, 0}, {0, 0, 0, 0}), InvalidInput);
  EXPECT_THROW(LabeledTree(kMaxTreeDepth + 1), ResourceLimit);
}

TEST(Ldim, ThresholdsOnEightPoints) {
  SetFamily fam{GroundSet(8)};
  for (std::size_t k = 0; k <= 8; ++k) fam.insert(low_bits(k));
  EXPECT_EQ(vcdim(fam), Dim::of(1));
  EXPECT_EQ(ldim(fam), Dim::of(3));  // floor(log2 9)
}

TEST(Ldim, WitnessTreeIsFullyWellLabeled) {
  SetFamily fam{GroundSet(4)};
  for (std::size_t k = 0; k <= 4; ++k) fam.insert(low_bits(k));
  const LabeledTree t = ldim_witness(fam);
  EXPECT_EQ(static_cast<int>(t.depth()), ldim(fam).value());
  EXPECT_EQ(count_well_labeled(t, fam), t.leaf_count());
}

TEST(Ldim, EmptyFamily) {
  const SetFamily empty{GroundSet(3)};
  EXPECT_TRUE(ldim(empty).is_neg_infinity());
  for (std::size_t n = 0; n <= 3; ++n) EXPECT_EQ(rho(empty, n), 0u);
  EXPECT_THROW(ldim_witness(empty), InvalidInput);
}

TEST(Rho, PowerSetOfThreePoints) {
  SetFamily fam{GroundSet(3)};
  for (Mask m = 0; m < 8; ++m) fam.insert(m);
  for (std::size_t n = 0; n <= 3; ++n) EXPECT_EQ(rho(fam, n), binom_le(n, 3));
  // only 3 distinct points: deeper trees repeat them and gain nothing
  EXPECT_EQ(rho(fam, 5), 8u);
}

TEST(Rho, EmptyGroundSet) {
  const SetFamily fam = family(0, {0});
  EXPECT_EQ(rho(fam, 0), 1u);
  EXPECT_EQ(rho(fam, 2), 0u);
  EXPECT_EQ(ldim(fam), Dim::of(0));
}

TEST(Rho, DepthCapIsEnforced) {
  const SetFamily fam = family(2, {0, 1});
  LittlestoneSearch search(fam, 2);
  EXPECT_NO_THROW(search.rho(2));
  EXPECT_THROW(search.rho(3), ResourceLimit);
}

TEST(Oracles, RandomFamiliesAgreeWithUnmemoizedRecursion) {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<std::size_t> w(0, 5), c(0, 10);
  for (int trial = 0; trial < 120; ++trial) {
    const std::size_t width = w(rng);
    std::uniform_int_distribution<Mask> s(0, low_bits(width));
    SetFamily fam{GroundSet(width)};
    const std::size_t count = c(rng);
    for (std::size_t i = 0; i < count; ++i) fam.insert(s(rng));
    const Dim ld = ldim(fam);
    EXPECT_EQ(ld.is_neg_infinity() ? -1 : ld.value(), oracle::ldim(fam.sets(), width));
    EXPECT_LE(vcdim(fam), ld);
    LittlestoneSearch search(fam);
    for (std::size_t n = 0; n <= 4; ++n) {
      const auto r = search.rho(n);
      EXPECT_EQ(r, oracle::rho(fam.sets(), width, n)) << "n=" << n;
      if (n <= 3) {
        EXPECT_EQ(r, rho_via_trees(fam, n));
      }
      if (n <= width) {
        EXPECT_LE(pi(fam, n), r);
      }
      if (!ld.is_neg_infinity()) {
        EXPECT_LE(r, binom_le(n, ld.value()));
      }
    }
  }
}

TEST(Profiles, VcAndLittlestone) {
  const SetFamily fam = family(3, {0b000, 0b001, 0b010, 0b100});
  const auto vc = vc_profile(fam, 3);
  EXPECT_EQ(vc.values, (std::vector<std::uint64_t>{1, 2, 3, 4}));
  const auto ls = littlestone_profile(fam, 3);
  EXPECT_EQ(ls.values, (std::vector<std::uint64_t>{1, 2, 3, 4}));
}
