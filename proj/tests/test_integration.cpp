#include "emeasure/errors.hpp"
#include "emeasure/integration.hpp"

#include <gtest/gtest.h>

#include "support/random_instances.hpp"

using namespace emeasure;

namespace {

const XValue inf = XValue::infinity();

}  // namespace

TEST(OrderMeasurable, RejectsLevelSetOutsideClass) {
  std::vector<PointSet> gens{PointSet::of(3, {0, 1}), PointSet::of(3, {2})};
  auto cls = HypothesisClass::union_closure(3, gens);
  EXPECT_NO_THROW(OrderMeasurableFn({2, 2, 1}, cls));
  try {
    OrderMeasurableFn({2, 1, 1}, cls);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotOrderMeasurable);
    EXPECT_NE(std::string(e.what()).find("f >= 2"), std::string::npos);
  }
}

TEST(Shilkret, TwoPointThresholdExample) {
  HypothesisSpace s(Model::indexed(2), HypothesisClass::power_set(2));
  auto e = classify({inf, 4, 2, 2}, s.cls());
  OrderMeasurableFn f({8, 2}, s.cls());
  // levels 2 -> {P1,P2}: 2/2 = 1 ; 8 -> {P1}: 8/4 = 2
  EXPECT_EQ(shilkret_integral(f, e, s.cls()), XValue(2));
  EXPECT_EQ(integral_least_true(f, e, s), XValue(2));
}

TEST(Shilkret, ZeroFunctionIntegratesToZero) {
  auto cls = HypothesisClass::power_set(2);
  OrderMeasurableFn f({0, 0}, cls);
  EXPECT_EQ(shilkret_integral(f, one_measure(cls), cls), XValue(0));
}

TEST(Shilkret, AppendixProperties) {
  emtest::Rng rng(31);
  for (int i = 0; i < 200; ++i) {
    auto s = emtest::random_ic_space(rng);
    const auto& cls = s.cls();
    auto cap = emtest::random_capacity(rng, cls);
    auto meas = closure_fast(cap, s);
    auto f = emtest::random_fn(rng, cls);
    auto g = emtest::random_fn(rng, cls);

    const Rational a(static_cast<long long>(emtest::uniform(rng, 1, 7)), 3);
    EXPECT_EQ(shilkret_integral(f.scaled(a, cls), cap, cls), XValue(a) * shilkret_integral(f, cap, cls));

    const HypId h = hyp_id(emtest::uniform(rng, 0, cls.size() - 1));
    EXPECT_EQ(shilkret_integral(OrderMeasurableFn::indicator(cls.at(h), cls), cap, cls), reciprocal(cap[h]));

    std::vector<OrderMeasurableFn> fg{f, g};
    auto sup = OrderMeasurableFn::pointwise_sup(fg, cls);
    EXPECT_GE(shilkret_integral(sup, cap, cls), shilkret_integral(f, cap, cls));
    EXPECT_TRUE(sup_interchange_check(fg, cap, cls).geq);
    EXPECT_TRUE(sup_interchange_check(fg, meas, cls).equal);

    const std::size_t p = emtest::uniform(rng, 0, s.width() - 1);
    EXPECT_EQ(shilkret_integral(f, dirac(cls, p), cls), f(p));
    EXPECT_EQ(shilkret_integral(f, one_measure(cls), cls), *std::max_element(f.values().begin(), f.values().end()));

    EXPECT_EQ(integral_least_true(sup, meas, s),
              std::max(integral_least_true(f, meas, s), integral_least_true(g, meas, s)));
    EXPECT_EQ(integral_least_true(f, meas, s), shilkret_integral(f, meas, cls));

    for (const auto& c : f.levels()) {
      if (c.is_inf()) continue;
      EXPECT_TRUE(e_markov_check(f, cap, cls, c).holds);
    }
    EXPECT_TRUE(posthoc_markov_identity(f, cap, cls).all_equal);
  }
}

TEST(Shilkret, CapacityCanMakeInterchangeStrict) {
  HypothesisSpace s(Model::indexed(2), HypothesisClass::power_set(2));
  auto cap = classify({inf, 4, 2, 1}, s.cls());
  std::vector<OrderMeasurableFn> fs{OrderMeasurableFn({1, 0}, s.cls()), OrderMeasurableFn({0, 1}, s.cls())};
  auto r = sup_interchange_check(fs, cap, s.cls());
  EXPECT_EQ(r.integral_of_sup, XValue(1));
  EXPECT_EQ(r.sup_of_integrals, XValue(1, 2));
  EXPECT_TRUE(r.geq);
  EXPECT_FALSE(r.equal);
}

TEST(Shilkret, LeastTrueNeedsMeasure) {
  HypothesisSpace s(Model::indexed(2), HypothesisClass::power_set(2));
  auto cap = classify({inf, 4, 2, 1}, s.cls());
  OrderMeasurableFn f({1, 1}, s.cls());
  EXPECT_THROW(integral_least_true(f, cap, s), Error);
  EXPECT_THROW(e_markov_check(f, cap, s.cls(), XValue(0)), Error);
}
