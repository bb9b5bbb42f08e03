#include <gtest/gtest.h>

#include "oracles.hpp"
#include "zsdim/constructions.hpp"

using namespace zsdim;

namespace {

const Field Q = Field::rational();

}  // namespace

TEST(DualBasis, MomentCurveD2) {
  const DualBasis db = dual_basis(moment_curve(Q, 2));
  ASSERT_EQ(db.points.size(), 2u);
  EXPECT_EQ(point_label(db.points[0]), "0");
  EXPECT_EQ(point_label(db.points[1]), "1");
  // g_0 = 1 - x, g_1 = x
  EXPECT_EQ(db.coeffs.row(0).str(), "(1,-1)");
  EXPECT_EQ(db.coeffs.row(1).str(), "(0,1)");
  EXPECT_TRUE(db.kronecker_holds());
}

TEST(DualBasis, KroneckerOnConics) {
  const DualBasis db = dual_basis(conics(Q));
  EXPECT_EQ(db.points.size(), 6u);
  for (std::size_t j = 0; j < 6; ++j)
    for (std::size_t i = 0; i < 6; ++i) {
      const Scalar v = dot(db.coeffs.row(j), db.images[i]);
      EXPECT_EQ(v.is_one(), i == j);
      EXPECT_EQ(v.is_zero(), i != j);
    }
}

TEST(ShatteredSet, AllSubsetsRealized) {
  const ShatteredSet sh = shattered_set(dual_basis(moment_curve(Q, 4)));
  EXPECT_EQ(sh.points.size(), 3u);
  EXPECT_TRUE(shatters(sh.family, sh.family.ground().full()));
  EXPECT_TRUE(transcript_holds(sh.transcript));
  EXPECT_EQ(sh.witnesses.size(), 15u);
}

TEST(IndependenceSequence, MomentCurveIsDWiseIndependent) {
  const auto seq = independence_sequence(moment_curve(Q, 3), 8);
  EXPECT_EQ(seq.size(), 8u);
  EXPECT_TRUE(seq.verify());
  // every 3 images: nonzero Vandermonde determinant
  for_each_subset_of_size(8, 3, [&](Mask m) {
    oracle::QMatrix rows;
    for (std::size_t i : mask_indices(m)) {
      std::vector<mpq_class> row;
      for (const auto& x : seq.images[i]) row.push_back(x.rational());
      rows.push_back(row);
    }
    EXPECT_NE(oracle::det(rows), 0);
  });
}

TEST(IndependenceSequence, PlaneUnionExhaustsAtFive) {
  const Instance hv = high_vcden(Q, 3);
  EXPECT_NO_THROW(independence_sequence(hv, 4, 200));
  try {
    independence_sequence(hv, 5, 200);
    FAIL() << "expected exhaustion";
  } catch (const SearchExhausted& e) {
    EXPECT_EQ(e.partial().size(), 4u);
    EXPECT_FALSE(e.blocking().empty());
  }
}

TEST(SubsetWitness, SpansTheChosenPoints) {
  const auto seq = independence_sequence(moment_curve(Q, 3), 5);
  const Vector b = subset_witness(seq, {0, 2});
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(dot(b, seq.images[i]).is_zero(), i == 0 || i == 2) << i;
  EXPECT_THROW(subset_witness(seq, {0}), InvalidInput);
}

TEST(MaxVcTrace, MatchesBinomialSums) {
  EXPECT_EQ(max_vc_trace_length(4, 3), 6u);
  EXPECT_EQ(max_vc_trace_length(4, 1), 4u);
  const auto seq = independence_sequence(moment_curve(Q, 3), max_vc_trace_length(6, 3));
  for (std::size_t n = 0; n <= 6; ++n) {
    const auto mt = max_vc_trace(seq, n);
    EXPECT_EQ(mt.family.size(), oracle::binom_le(n, 2)) << n;
    EXPECT_TRUE(transcript_holds(mt.transcript));
    const auto tree = level_balanced_tree(mt.family, n);
    EXPECT_TRUE(tree.level_balanced());
    EXPECT_EQ(count_well_labeled(tree, mt.family), oracle::binom_le(n, 2));
  }
}

TEST(MaxVcTrace, ShortSequenceRejected) {
  const auto seq = independence_sequence(moment_curve(Q, 3), 4);
  EXPECT_THROW(max_vc_trace(seq, 4), InvalidInput);
}

TEST(PlaneUnion, WitnessFormula) {
  EXPECT_EQ(high_vcden_witness(Q, 3, {0, 0}).str(), "(1,-1,-1)");
  EXPECT_EQ(high_vcden_witness(Q, 3, {0, 1}).str(), "(2,-2,-1)");
  const Vector b = high_vcden_witness(Q, 3, {2, 5});
  EXPECT_EQ(b.canonical().str(), "(1,-1/3,-1/6)");
  for (std::size_t j = 0; j < 7; ++j) {
    EXPECT_EQ(dot(b, high_vcden_point(Q, 3, 0, j)).is_zero(), j == 2);
    EXPECT_EQ(dot(b, high_vcden_point(Q, 3, 1, j)).is_zero(), j == 5);
  }
}

TEST(PlaneUnion, ExplicitTreeLeafCounts) {
  const std::vector<std::uint64_t> expected{1, 2, 4, 7, 11, 16, 22};
  for (std::size_t n = 1; n <= 6; ++n) {
    const auto t = high_vcden_max_tree(Q, 3, n);
    EXPECT_EQ(count_well_labeled(t.tree, t.family), expected[n]) << n;
  }
}

TEST(PlaneUnion, Path001001) {
  const auto t = high_vcden_max_tree(Q, 3, 6);
  const std::size_t leaf = LabeledTree::path_index("001001");
  std::vector<std::string> labels;
  for (std::size_t k = 0; k < 6; ++k) labels.push_back(t.sample.ground().label(t.tree.node(k, leaf >> (6 - k))));
  EXPECT_EQ(labels, (std::vector<std::string>{"(1,1,0)", "(1,2,0)", "(1,3,0)", "(1,0,4)", "(1,0,5)", "(1,0,6)"}));
  EXPECT_TRUE(leaf_well_labeled(t.tree, t.family, leaf));
  EXPECT_EQ(t.family.witness(t.tree.leaf(leaf))->str(), "(1,-1/3,-1/6)");
}

TEST(PlaneUnion, SmallDimensionRejected) {
  EXPECT_THROW(high_vcden_max_tree(Q, 2, 3), InvalidInput);
}
