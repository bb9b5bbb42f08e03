#include <gtest/gtest.h>

#include <set>

#include "oracles.hpp"
#include "zsdim/io.hpp"
#include "zsdim/polynomial.hpp"
#include "zsdim/zerosets.hpp"

using namespace zsdim;

namespace {

const Field Q = Field::rational();

Instance preset(const std::string& name) { return io::instance_from_json(io::preset_instance(name)); }

// Lower bound on the trace count: zero sets of integer vectors in a box.
std::size_t box_traces(const Instance& inst, const Sample& s, long long r) {
  std::set<Mask> seen;
  std::vector<long long> a(inst.dim, -r);
  while (true) {
    if (std::any_of(a.begin(), a.end(), [](long long x) { return x != 0; })) {
      Mask m = 0;
      for (std::size_t i = 0; i < s.size(); ++i) {
        mpq_class acc = 0;
        for (std::size_t k = 0; k < inst.dim; ++k) acc += mpq_class(static_cast<long>(a[k])) * s.images[i][k].rational();
        if (acc == 0) m |= Mask{1} << i;
      }
      seen.insert(m);
    }
    std::size_t k = 0;
    while (k < a.size() && a[k] == r) a[k++] = -r;
    if (k == a.size()) break;
    ++a[k];
  }
  return seen.size();
}

}  // namespace

TEST(Polynomial, ParseAndEvaluate) {
  const std::vector<std::string> xy{"x", "y"};
  const Polynomial p = Polynomial::parse("x^2 - 3*x*y + 2", xy);
  const std::vector<Scalar> at{Scalar(Q, 2), Scalar(Q, 1)};
  EXPECT_EQ(p.evaluate(Q, at).str(), "0");
  const Polynomial u = Polynomial::parse("x·y − 1", xy);
  EXPECT_EQ(u.evaluate(Q, at).str(), "1");
  EXPECT_THROW(Polynomial::parse("x + z", xy), InvalidInput);
  EXPECT_THROW(Polynomial::parse("x +", xy), InvalidInput);
}

TEST(Streams, NaturalsAndShells) {
  const auto nat = PointStream::naturals(Q).prefix(3);
  EXPECT_EQ(point_label(nat[2]), "2");
  const auto shells = PointStream::integer_shells(Q, 2).prefix(9);
  EXPECT_EQ(point_label(shells[0]), "(0,0)");
  std::set<std::string> labels;
  for (const auto& p : shells) labels.insert(point_label(p));
  EXPECT_EQ(labels.size(), 9u);
  EXPECT_TRUE(labels.count("(-1,-1)") && labels.count("(1,1)"));
  EXPECT_EQ(PointStream::field_domain(Field::prime(3), 2).prefix(20).size(), 9u);
}

TEST(MomentCurve, ImagesAreVandermondeRows) {
  const Instance mc = moment_curve(Q, 4);
  EXPECT_EQ(mc.image(point_of(Q, {3})).str(), "(1,3,9,27)");
}

TEST(Enumerate, MomentCurveD3SixPoints) {
  const Instance mc = moment_curve(Q, 3);
  const Sample s = stream_sample(mc, 6);
  const ZeroSetFamily z = enumerate_family(mc, s);
  EXPECT_EQ(z.family.size(), 22u);  // C(6,0)+C(6,1)+C(6,2)
  EXPECT_TRUE(witnesses_verify(z));
  EXPECT_EQ(box_traces(mc, s, 20), 22u);  // (ij, -(i+j), 1) needs |a| <= 20
}

TEST(Enumerate, ConicsTraceIsBoundedByBox) {
  const Instance c = conics(Q);
  const Sample s = stream_sample(c, 7);
  const ZeroSetFamily z = enumerate_family(c, s);
  EXPECT_TRUE(witnesses_verify(z));
  EXPECT_LE(box_traces(c, s, 1), z.family.size());
  EXPECT_EQ(vcdim(z.family), Dim::of(5));
}

TEST(Enumerate, FlatsMatchBruteForceOverF5) {
  const Instance mc = moment_curve(Field::prime(5), 3);
  const Sample s = stream_sample(mc, 5);
  const auto a = enumerate_family_flats(mc, s);
  const auto b = enumerate_family_bruteforce(mc, s);
  EXPECT_TRUE(a.family.same_sets(b.family));
  EXPECT_EQ(a.family.size(), 16u);
}

TEST(Enumerate, EmptySampleHasOneTrace) {
  const Instance mc = moment_curve(Q, 2);
  const ZeroSetFamily z = enumerate_family(mc, make_sample(mc, {}));
  EXPECT_EQ(z.family.size(), 1u);
}

TEST(Sample, DuplicatePointsRejected) {
  const Instance mc = moment_curve(Q, 2);
  EXPECT_THROW(make_sample(mc, {point_of(Q, {1}), point_of(Q, {1})}), InvalidInput);
}

TEST(ZeroSet, RequiresNonzeroWitness) {
  const Instance mc = moment_curve(Q, 2);
  const Sample s = stream_sample(mc, 3);
  EXPECT_THROW(zero_set(mc, s, Vector(Q, 2)), InvalidInput);
  const ZeroSet z = zero_set(mc, s, Vector::of(Q, {-2, 1}));
  EXPECT_EQ(z.members, Mask{0b100});
}

TEST(Independence, BuiltinsAreIndependent) {
  for (const char* name : {"moment_curve:3", "conics", "ellipse", "affine_f3"}) {
    const Instance inst = preset(name);
    const auto v = linearly_independent(inst, 10000);
    EXPECT_EQ(v.kind, IndependenceVerdict::Kind::independent) << name;
    EXPECT_EQ(v.points.size(), inst.dim);
    const auto c = independence_conditions(inst, 10000);
    EXPECT_TRUE(c.consistent()) << name;
    EXPECT_EQ(c.image_spans, true) << name;
  }
}

TEST(Independence, NegativeControlX2X) {
  const Instance inst = preset("x_2x");
  const auto v = linearly_independent(inst, 100);
  ASSERT_EQ(v.kind, IndependenceVerdict::Kind::dependent);
  ASSERT_TRUE(v.annihilator.has_value());
  EXPECT_EQ(v.annihilator->canonical().str(), "(1,-1/2)");
  const auto c = independence_conditions(inst, 100);
  EXPECT_EQ(c.functions_independent, false);
  EXPECT_EQ(c.no_vanishing_combination, false);
  EXPECT_EQ(c.image_spans, false);
  EXPECT_TRUE(c.consistent());
}

TEST(Independence, XCubedOverF3) {
  const Instance inst = preset("x_x3_f3");
  const auto v = linearly_independent(inst, 100);
  ASSERT_EQ(v.kind, IndependenceVerdict::Kind::dependent);
  EXPECT_EQ(v.annihilator->canonical().str(), "(1,2)");
  for (std::uint64_t x = 0; x < 3; ++x) EXPECT_EQ(oracle::mod_mul(oracle::mod_mul(x, x, 3), x, 3), x);
}

TEST(Independence, BudgetBelowDimensionRejected) {
  EXPECT_THROW(linearly_independent(moment_curve(Q, 4), 3), InvalidInput);
}

TEST(DensityZero, TwoLines) {
  const Instance inst = preset("two_lines");
  const auto rep = density_zero_partition(inst, stream_sample(inst, 6),
                                          {{Vector::of(Q, {1, 0})}, {Vector::of(Q, {0, 1})}});
  EXPECT_EQ(rep.blocks.size(), 2u);
  EXPECT_EQ(rep.bound, 4u);
  EXPECT_LE(rep.family_size, 4u);
  EXPECT_TRUE(rep.traces_are_block_unions);
}

TEST(PlaneUnion, GainNeedsLargeEnoughPrime) {
  EXPECT_THROW(plane_union_gain(Field::prime(3), 2), InvalidInput);
  EXPECT_NO_THROW(plane_union_gain(Field::prime(5), 2));
}
