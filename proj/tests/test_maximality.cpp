#include <gtest/gtest.h>

#include "oracles.hpp"
#include "zsdim/io.hpp"
#include "zsdim/maximality.hpp"

using namespace zsdim;

namespace {

const Field Q = Field::rational();

Instance preset(const std::string& name) { return io::instance_from_json(io::preset_instance(name)); }

}  // namespace

TEST(SpanInjective, DetectsCollisionAndImproperMembers) {
  SpanFamily fam{Q, 3, {{Vector::of(Q, {1, 0, 0})}, {Vector::of(Q, {2, 0, 0})}}};
  auto r = span_injective(fam);
  EXPECT_FALSE(r.injective);
  ASSERT_TRUE(r.collision.has_value());
  fam.members = {{Vector::unit(Q, 3, 0), Vector::unit(Q, 3, 1), Vector::unit(Q, 3, 2)}};
  r = span_injective(fam);
  EXPECT_FALSE(r.injective);
  EXPECT_TRUE(r.improper.has_value());
}

TEST(SpanInjective, EnumeratedImageFamilies) {
  for (const char* name : {"moment_curve:3", "conics", "high_vcden:3", "two_lines"}) {
    const Instance inst = preset(name);
    const auto z = enumerate_family(inst, stream_sample(inst, 6));
    EXPECT_TRUE(span_injective(image_family(z)).injective) << name;
  }
}

TEST(Reduction, KeepsCardinalityWithIndependentMembers) {
  const Instance inst = preset("high_vcden:3");
  const auto img = image_family(enumerate_family(inst, stream_sample(inst, 7)));
  const auto red = minimal_spanning_reduction(img);
  EXPECT_EQ(red.size(), img.size());
  EXPECT_TRUE(span_injective(red).injective);
  for (std::size_t i = 0; i < red.size(); ++i) {
    EXPECT_LT(red.members[i].size(), 3u);
    EXPECT_TRUE(img.members[i].empty() || same_span(red.members[i], img.members[i]));
    oracle::QMatrix rows;
    for (const auto& v : red.members[i]) {
      std::vector<mpq_class> row;
      for (const auto& x : v) row.push_back(x.rational());
      rows.push_back(row);
    }
    EXPECT_EQ(oracle::rank_by_minors(rows), red.members[i].size());
  }
}

TEST(Cover, PlaneUnionCoverValidates) {
  const auto cover = plane_union_cover(Q, 3);
  EXPECT_EQ(cover.k(), 2u);
  EXPECT_NO_THROW(cover.validate());
  EXPECT_EQ(cover.covering(Vector::of(Q, {1, 5, 0})), std::optional<std::size_t>(0));
  EXPECT_FALSE(cover.covering(Vector::of(Q, {1, 1, 1})).has_value());
  const CoverCertificate full{Q, 2, {{Vector::unit(Q, 2, 0), Vector::unit(Q, 2, 1)}}};
  EXPECT_THROW(full.validate(), InvalidInput);
}

TEST(NotMaximal, StrictInequalityOnCoveredSample) {
  const Instance hv = high_vcden(Q, 3);
  const auto z = enumerate_family(hv, stream_sample(hv, 6));
  const auto rep = not_maximal_bound_check(distinct_vectors(z.sample.images), plane_union_cover(Q, 3), image_family(z));
  EXPECT_TRUE(rep.strictly_below);
  EXPECT_EQ(rep.bound, oracle::binom_le(6, 2));
  EXPECT_LT(rep.family_size, rep.bound);
  EXPECT_GE(rep.crowded_points.size(), 3u);
}

TEST(NotMaximal, SmallSampleRejected) {
  const Instance hv = high_vcden(Q, 3);
  const auto z = enumerate_family(hv, stream_sample(hv, 4));
  EXPECT_THROW(not_maximal_bound_check(distinct_vectors(z.sample.images), plane_union_cover(Q, 3), image_family(z)),
               InvalidInput);
}

TEST(Certificate, PlaneUnionAtFivePoints) {
  const auto v = non_maximality_certificate(high_vcden(Q, 3), plane_union_cover(Q, 3), 1000);
  EXPECT_EQ(v.status, NonMaximalityVerdict::Status::certified);
  EXPECT_EQ(v.n, 5u);
  EXPECT_EQ(v.trace_count, 14u);
  EXPECT_EQ(v.bound, 16u);
}

TEST(Certificate, FalseCoverIsRefuted) {
  const CoverCertificate claim{Q, 3, {{Vector::unit(Q, 3, 0), Vector::unit(Q, 3, 1)}}};
  const auto v = non_maximality_certificate(moment_curve(Q, 3), claim, 100);
  EXPECT_EQ(v.status, NonMaximalityVerdict::Status::refuted);
  ASSERT_TRUE(v.escaping_image.has_value());
  EXPECT_FALSE(claim.covering(*v.escaping_image).has_value());
}

TEST(Dichotomy, ExactlyOneSide) {
  const auto mc = maximality_dichotomy(moment_curve(Q, 3), std::nullopt, 5, 500);
  EXPECT_TRUE(mc.exactly_one());
  EXPECT_TRUE(mc.maximal_side);
  const auto hv = maximality_dichotomy(high_vcden(Q, 3), plane_union_cover(Q, 3), 5, 500);
  EXPECT_TRUE(hv.exactly_one());
  EXPECT_TRUE(hv.cover_side);
  EXPECT_FALSE(hv.maximal_failure.empty());
}
