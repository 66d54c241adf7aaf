#include "emeasure/errors.hpp"
#include "emeasure/kernels.hpp"
#include "emeasure/multiplicity.hpp"
#include "emeasure/table1.hpp"

#include <gtest/gtest.h>

#include "support/random_instances.hpp"

using namespace emeasure;

namespace {

const XValue inf = XValue::infinity();

ProbabilityAssignment two_coins() {
  return ProbabilityAssignment({Pmf({Rational(1, 2), Rational(1, 2)}), Pmf({Rational(1, 4), Rational(3, 4)})});
}

}  // namespace

TEST(Pmf, RequiresExactNormalisation) {
  EXPECT_THROW(Pmf({Rational(1, 2), Rational(1, 3)}), Error);
  EXPECT_THROW(Pmf({Rational(3, 2), Rational(-1, 2)}), Error);
  EXPECT_EQ(Pmf::uniform(4)[2], Rational(1, 4));
}

TEST(Pmf, ExpectationUsesZeroTimesInfinity) {
  Pmf p({Rational(0), Rational(1)});
  std::vector<XValue> v{inf, XValue(3)};
  EXPECT_EQ(p.expectation(v), XValue(3));
}

TEST(Validity, ConstantKernels) {
  auto cls = HypothesisClass::power_set(2);
  auto pa = two_coins();
  EXPECT_TRUE(check_validity(constant_kernel(cls, 2, 1), pa, cls).valid);
  auto r = check_validity(constant_kernel(cls, 2, 2), pa, cls);
  EXPECT_FALSE(r.valid);
  ASSERT_TRUE(r.first_violation());
  EXPECT_EQ(r.first_violation()->expectation, XValue(2));
}

TEST(Validity, LikelihoodKernelIsExactlyTight) {
  auto cls = HypothesisClass::power_set(2);
  auto pa = two_coins();
  auto k = likelihood_kernel(cls, pa, Pmf::uniform(2));
  EXPECT_EQ(k.class_of(), EClass::Measure);
  for (const auto& e : check_validity(k, pa, cls).entries) {
    if (cls.at(e.hypothesis).count() == 1) EXPECT_EQ(e.expectation, XValue(1));
    EXPECT_TRUE(e.ok);
  }
}

TEST(Validity, ClosurePreservesVerdict) {
  emtest::Rng rng(41);
  for (int i = 0; i < 150; ++i) {
    auto s = emtest::random_ic_space(rng);
    auto pa = emtest::random_assignment(rng, s.width(), emtest::uniform(rng, 1, 3));
    auto k = emtest::random_capacity_kernel(rng, s.cls(), pa, i % 2 ? Rational(1) : Rational(3, 2));
    auto closed = close_kernel(k, s);
    EXPECT_EQ(check_validity(k, pa, s.cls()).valid, check_validity(closed, pa, s.cls()).valid);
    EXPECT_EQ(closed.class_of(), EClass::Measure);
  }
}

TEST(Validity, MergedValidKernelsStayValid) {
  emtest::Rng rng(42);
  for (int i = 0; i < 60; ++i) {
    auto s = emtest::random_ic_space(rng);
    auto pa = emtest::random_assignment(rng, s.width(), 3);
    std::vector<EKernel> ks{emtest::random_capacity_kernel(rng, s.cls(), pa, 1),
                            emtest::random_capacity_kernel(rng, s.cls(), pa, 1)};
    std::vector<Rational> w{Rational(1, 3), Rational(2, 3)};
    EXPECT_TRUE(check_validity(merge_kernels(ks, w, s.cls()), pa, s.cls()).valid);
  }
}

TEST(ConfidenceSet, Thresholds) {
  auto cls = HypothesisClass::power_set(2);
  auto k = EKernel::classify({{inf, 4, 2, 2}}, cls);
  EXPECT_EQ(confidence_set(k, Rational(1, 3), 0).size(), 2u);  // 2 < 3, 4 >= 3
  EXPECT_EQ(confidence_set(k, Rational(1), 0).size(), 0u);
  EXPECT_THROW(confidence_set(k, Rational(0), 0), Error);
  auto zero = EKernel::classify({{inf, 0, 0, 0}}, cls);
  EXPECT_EQ(confidence_set(zero, Rational(1), 0).size(), 3u);
}

TEST(ConfidenceSet, BinaryRejectionFromToyInstance) {
  auto inst = toy_instance();
  auto bin = ebh_procedure(inst.e, inst.space, inst.family, Rational(1, 20)).binary;
  auto k = EKernel::from_columns({bin});
  auto keep = confidence_set(k, Rational(1, 20), 0);
  std::vector<std::string> excluded;
  for (std::size_t c = 0; c < inst.cells.size(); ++c) {
    if (std::find(keep.begin(), keep.end(), inst.cells[c]) == keep.end()) excluded.push_back(inst.cell_names[c]);
  }
  for (std::size_t g = 0; g < inst.family.size(); ++g) {
    if (std::find(keep.begin(), keep.end(), inst.family[g]) == keep.end()) excluded.push_back(inst.family_names[g]);
  }
  EXPECT_EQ(excluded, (std::vector<std::string>{"H_1", "H_12", "H_13", "H_123", "G_1"}));
}

TEST(Posthoc, CanonicalRuleReproducesValidityStatistic) {
  emtest::Rng rng(43);
  for (int i = 0; i < 100; ++i) {
    auto s = emtest::random_ic_space(rng);
    auto pa = emtest::random_assignment(rng, s.width(), 3);
    auto k = emtest::random_capacity_kernel(rng, s.cls(), pa, i % 2 ? Rational(1) : Rational(3, 2));
    auto v = check_validity(k, pa, s.cls());
    auto ph = check_posthoc_validity(k, pa, s.cls(), canonical_rule(k));
    ASSERT_EQ(v.entries.size(), ph.entries.size());
    for (std::size_t j = 0; j < v.entries.size(); ++j) EXPECT_EQ(v.entries[j].expectation, ph.entries[j].expectation);
    EXPECT_EQ(v.valid, ph.holds);
    const std::vector<Rational> grid{Rational(1, 20), Rational(1, 2), Rational(1)};
    EXPECT_EQ(v.valid, !search_posthoc_violation(k, pa, s.cls(), grid).has_value());
  }
}

TEST(Posthoc, ConstantRuleIsCoverage) {
  auto cls = HypothesisClass::power_set(2);
  auto pa = two_coins();
  auto k = likelihood_kernel(cls, pa, Pmf::uniform(2));
  auto r = check_posthoc_validity(k, pa, cls, constant_rule(Rational(1, 2)));
  EXPECT_TRUE(r.holds);
}

TEST(Posthoc, InvalidKernelHasWitness) {
  auto cls = HypothesisClass::power_set(2);
  auto pa = two_coins();
  auto k = constant_kernel(cls, 2, 2);
  const std::vector<Rational> grid{Rational(1, 2)};
  auto w = search_posthoc_violation(k, pa, cls, grid);
  ASSERT_TRUE(w.has_value());
  EXPECT_GT(w->statistic, XValue(1));
}

TEST(Posterior, RawAndClosedBounds) {
  emtest::Rng rng(44);
  for (int i = 0; i < 100; ++i) {
    auto s = emtest::random_ic_space(rng);
    auto pa = emtest::random_assignment(rng, s.width(), 3);
    auto k = emtest::random_capacity_kernel(rng, s.cls(), pa, 1);
    auto prior = emtest::random_capacity(rng, s.cls());
    auto raw = eposterior_raw(prior, k, pa, s.cls());
    EXPECT_TRUE(raw.report.kernel_valid);
    EXPECT_TRUE(raw.report.holds);
    auto closed = eposterior_closed(prior, k, pa, s);
    EXPECT_TRUE(closed.report.holds);
    EXPECT_EQ(closed.kernel.class_of(), EClass::Measure);
    for (std::size_t x = 0; x < k.outcomes(); ++x) EXPECT_TRUE(dominates(closed.kernel.column(x), raw.kernel.column(x)));
  }
}

TEST(Posterior, UnitPriorReducesToKernel) {
  auto cls = HypothesisClass::power_set(2);
  auto pa = two_coins();
  auto k = likelihood_kernel(cls, pa, Pmf::uniform(2));
  auto raw = eposterior_raw(one_measure(cls), k, pa, cls);
  EXPECT_EQ(raw.kernel, k);
}

TEST(Posterior, ProductOfMeasuresCanLoseMeasureClass) {
  HypothesisSpace s(Model::indexed(2), HypothesisClass::power_set(2));
  auto prior = classify({inf, 1, 4, 1}, s.cls());
  auto k = EKernel::classify({{inf, 4, 1, 1}}, s.cls());
  ASSERT_EQ(prior.class_of(), EClass::Measure);
  ASSERT_EQ(k.class_of(), EClass::Measure);
  ProbabilityAssignment pa({Pmf::uniform(1), Pmf::uniform(1)});
  auto raw = eposterior_raw(prior, k, pa, s.cls());
  // {P1}: 4, {P2}: 4, {P1,P2}: 1 != min(4, 4)
  EXPECT_EQ(raw.kernel.class_of(), EClass::Capacity);
}

TEST(Predictive, SupIdentityAndEquivalence) {
  emtest::Rng rng(45);
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = emtest::uniform(rng, 2, 4);
    HypothesisSpace s(Model::indexed(n, "x"), HypothesisClass::power_set(n));
    auto qs = emtest::random_assignment(rng, 3, n);
    std::vector<EFunction> cols;
    for (std::size_t x = 0; x < n; ++x) cols.push_back(emtest::random_capacity(rng, s.cls(), false));
    auto k = EKernel::from_columns(std::move(cols));
    auto r = check_predictive_validity(k, qs, s);
    EXPECT_TRUE(r.sup_identity);
    EXPECT_EQ(r.valid, r.least_valid);
    for (std::size_t x = 0; x < n; ++x) EXPECT_EQ(r.least_true[x], k(s.cls().id_of(PointSet::singleton(n, x)), x));
  }
}

TEST(Predictive, SpaceMustBeOverOutcomes) {
  HypothesisSpace s(Model::indexed(3), HypothesisClass::power_set(3));
  auto k = constant_kernel(s.cls(), 2, 1);
  ProbabilityAssignment qs({Pmf::uniform(2)});
  EXPECT_THROW(check_predictive_validity(k, qs, s), Error);
}

TEST(Pushforward, IdentityAndCollapse) {
  auto cls = HypothesisClass::power_set(3);
  ProbabilityAssignment pa({Pmf({Rational(1, 2), Rational(1, 2)}), Pmf({Rational(1, 4), Rational(3, 4)}),
                            Pmf({Rational(3, 4), Rational(1, 4)})});
  auto k = likelihood_kernel(cls, pa, Pmf::uniform(2));
  std::vector<std::size_t> id{0, 1, 2};
  auto same = pushforward_kernel(k, cls, id, cls, pa);
  EXPECT_EQ(same.kernel, k);
  EXPECT_TRUE(same.validity.valid);

  auto target = HypothesisClass::power_set(2);
  std::vector<std::size_t> collapse{0, 0, 1};
  auto pf = pushforward_kernel(k, cls, collapse, target, pa);
  EXPECT_EQ(pf.kernel.class_of(), EClass::Measure);
  EXPECT_TRUE(pf.validity.valid);
  for (std::size_t x = 0; x < 2; ++x) {
    EXPECT_EQ(pf.kernel(target.id_of(PointSet::of(2, {0})), x), k(cls.id_of(PointSet::of(3, {0, 1})), x));
  }
}

TEST(Pushforward, RejectsNonMeasurableMap) {
  std::vector<PointSet> cells{PointSet::of(3, {0, 1}), PointSet::of(3, {2})};
  auto cls = HypothesisClass::union_closure(3, cells);
  auto k = constant_kernel(cls, 1, 1);
  ProbabilityAssignment pa({Pmf::uniform(1), Pmf::uniform(1), Pmf::uniform(1)});
  std::vector<std::size_t> f{0, 1, 1};
  try {
    pushforward_kernel(k, cls, f, HypothesisClass::power_set(2), pa);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotMeasurable);
  }
}
