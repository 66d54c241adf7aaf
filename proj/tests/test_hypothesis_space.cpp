#include "emeasure/errors.hpp"
#include "emeasure/hypothesis_space.hpp"

#include <gtest/gtest.h>

#include "support/random_instances.hpp"

using namespace emeasure;

namespace {

PointSet ps(std::size_t w, std::initializer_list<std::size_t> pts) { return PointSet::of(w, pts); }

HypothesisSpace overlap() {
  std::vector<PointSet> gens{ps(3, {0}), ps(3, {0, 1}), ps(3, {0, 2})};
  return HypothesisSpace(Model::indexed(3), HypothesisClass::union_closure(3, gens));
}

}  // namespace

TEST(HypothesisClass, UnionClosureOfGenerators) {
  std::vector<PointSet> gens{ps(3, {0}), ps(3, {1})};
  auto cls = HypothesisClass::union_closure(3, gens);
  EXPECT_EQ(cls.size(), 4u);
  EXPECT_TRUE(cls.contains(ps(3, {0, 1})));
  EXPECT_TRUE(cls.at(HypothesisClass::empty_id()).is_empty());
}

TEST(HypothesisClass, EmptyGeneratorsGiveOnlyTheEmptySet) {
  auto cls = HypothesisClass::union_closure(2, {});
  EXPECT_EQ(cls.size(), 1u);
}

TEST(HypothesisClass, FromMembersRejectsNonUnionClosed) {
  std::vector<PointSet> m{ps(3, {0}), ps(3, {1})};
  try {
    HypothesisClass::from_members(3, m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotUnionClosed);
  }
}

TEST(HypothesisClass, CanonicalOrderAndHasse) {
  auto cls = HypothesisClass::power_set(3);
  ASSERT_EQ(cls.size(), 8u);
  for (std::size_t i = 1; i < cls.size(); ++i) EXPECT_TRUE(canonical_less(cls.members()[i - 1], cls.members()[i]));
  EXPECT_EQ(cls.hasse().size(), 12u);  // edges of the 3-cube
}

TEST(HypothesisSpace, OverlapLeastHypotheses) {
  auto s = overlap();
  ASSERT_TRUE(s.intersection_closed());
  EXPECT_EQ(s.cls().at(s.least(0)), ps(3, {0}));
  EXPECT_EQ(s.cls().at(s.least(1)), ps(3, {0, 1}));
  EXPECT_EQ(s.cls().at(s.least(2)), ps(3, {0, 2}));
  EXPECT_EQ(s.describe(s.least(1)), "{P1,P2}");
}

TEST(HypothesisSpace, PowerSetLeastAreSingletons) {
  HypothesisSpace s(Model::indexed(4), HypothesisClass::power_set(4));
  for (std::size_t p = 0; p < 4; ++p) EXPECT_EQ(s.cls().at(s.least(p)), PointSet::singleton(4, p));
}

TEST(HypothesisSpace, PartitionSharesLeastHypothesis) {
  std::vector<PointSet> cells{ps(4, {0, 1}), ps(4, {2, 3})};
  HypothesisSpace s(Model::indexed(4), HypothesisClass::union_closure(4, cells));
  EXPECT_EQ(s.least(0), s.least(1));
  EXPECT_NE(s.least(1), s.least(2));
}

TEST(HypothesisSpace, NestedClassDependsOnFullModel) {
  std::vector<PointSet> nested2{ps(2, {0}), ps(2, {0, 1})};
  HypothesisSpace two(Model::indexed(2), HypothesisClass::union_closure(2, nested2));
  ASSERT_TRUE(two.intersection_closed());
  EXPECT_EQ(two.cls().at(two.least(1)), ps(2, {0, 1}));

  std::vector<PointSet> nested3{ps(3, {0}), ps(3, {0, 1})};
  HypothesisSpace three(Model::indexed(3), HypothesisClass::union_closure(3, nested3));
  EXPECT_FALSE(three.intersection_closed());
  EXPECT_FALSE(three.report().contains_full_model);
  try {
    three.least(0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotIntersectionClosed);
  }
}

TEST(HypothesisSpace, NotIntersectionClosedWhenTwoGeneratorsCross) {
  std::vector<PointSet> gens{ps(3, {0, 1}), ps(3, {1, 2})};
  HypothesisSpace s(Model::indexed(3), HypothesisClass::union_closure(3, gens));
  EXPECT_FALSE(s.intersection_closed());
}

TEST(HypothesisSpace, CanonicalCoverReassemblesEveryMember) {
  emtest::Rng rng(11);
  for (int i = 0; i < 50; ++i) {
    auto s = emtest::random_ic_space(rng);
    for (HypId h : s.cls().ids()) {
      std::uint64_t bits = 0;
      for (HypId l : canonical_cover(s, h)) bits |= s.cls().at(l).bits();
      EXPECT_EQ(bits, s.cls().at(h).bits());
    }
  }
}

TEST(HypothesisSpace, LeastMatchesScanOracle) {
  emtest::Rng rng(12);
  for (int i = 0; i < 100; ++i) {
    auto s = emtest::random_space(rng);
    bool all = s.report().contains_full_model;
    for (std::size_t p = 0; p < s.width(); ++p) all = all && emtest::naive_least(s.cls(), p).has_value();
    // A least member for every point exists exactly when the class is
    // intersection-closed with the full model present.
    EXPECT_EQ(all, s.intersection_closed());
    if (!s.intersection_closed()) continue;
    for (std::size_t p = 0; p < s.width(); ++p) EXPECT_EQ(s.cls().at(s.least(p)), *emtest::naive_least(s.cls(), p));
  }
}

TEST(Preorder, RoundTripThroughClass) {
  emtest::Rng rng(13);
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = emtest::uniform(rng, 1, 5);
    Preorder pre = emtest::random_preorder(rng, n);
    HypothesisSpace s(Model::indexed(n), class_from_preorder(pre));
    ASSERT_TRUE(s.intersection_closed());
    EXPECT_EQ(preorder_from_class(s), pre);
  }
}

TEST(Preorder, RejectsNonTransitiveRows) {
  std::vector<PointSet> rows{ps(3, {0, 1}), ps(3, {1, 2}), ps(3, {2})};
  try {
    Preorder::from_rows(rows);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotAPreorder);
  }
}

TEST(Preimage, ClassOfPreimages) {
  auto target = HypothesisClass::power_set(2);
  std::vector<std::size_t> f{0, 0, 1};
  auto pre = preimage_class(target, f, 3);
  EXPECT_EQ(pre.size(), 4u);
  EXPECT_TRUE(pre.contains(ps(3, {0, 1})));
  EXPECT_TRUE(pre.contains(ps(3, {2})));
  EXPECT_FALSE(pre.contains(ps(3, {0})));
}

TEST(Model, RejectsDuplicatesAndCap) {
  EXPECT_THROW(Model({"a", "a"}), Error);
  EXPECT_THROW(Model::indexed(25), Error);
  EXPECT_NO_THROW(Model::indexed(24));
}
