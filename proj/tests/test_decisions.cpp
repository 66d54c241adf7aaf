#include "emeasure/decisions.hpp"
#include "emeasure/errors.hpp"

#include <gtest/gtest.h>

#include "support/random_instances.hpp"

using namespace emeasure;

namespace {

using Pairs = std::vector<std::pair<std::size_t, std::size_t>>;

/// Two decisions on three points with opposite losses.
NumericLoss seesaw() {
  return NumericLoss{{"left", "right"}, {{XValue(0), XValue(1), XValue(2)}, {XValue(2), XValue(1), XValue(0)}}};
}

NumericLoss random_loss(emtest::Rng& rng, std::size_t points) {
  NumericLoss loss;
  const std::size_t decisions = emtest::uniform(rng, 1, 3);
  for (std::size_t d = 0; d < decisions; ++d) {
    loss.decisions.push_back("d" + std::to_string(d));
    std::vector<XValue> row;
    for (std::size_t p = 0; p < points; ++p) row.push_back(XValue(static_cast<std::int64_t>(emtest::uniform(rng, 0, 3))));
    loss.entries.push_back(row);
  }
  return loss;
}

}  // namespace

TEST(ConsequenceSpace, ValidatesPreorder) {
  EXPECT_NO_THROW(ConsequenceSpace({"a", "b", "c"}, Pairs{{0, 1}, {1, 2}, {0, 2}}));
  try {
    ConsequenceSpace({"a", "b", "c"}, Pairs{{0, 1}, {1, 2}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotAPreorder);
  }
  EXPECT_THROW(ConsequenceSpace({"a", "a"}, Pairs{}), Error);
}

TEST(ConsequenceTable, MissingEntries) {
  ConsequenceTable t{{"d"}, ConsequenceSpace({"lo", "hi"}, Pairs{{1, 0}}), {{0, 1}}};
  EXPECT_NO_THROW(t.validate(2));
  try {
    t.validate(3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingEntry);
  }
}

TEST(ConsequenceClass, SeesawIsDiscrete) {
  auto table = seesaw().to_table();
  EXPECT_EQ(table.space.size(), 3u);
  auto cc = build_consequence_class(table, Model::indexed(3));
  EXPECT_TRUE(cc.missing.empty());
  for (std::size_t p = 0; p < 3; ++p) EXPECT_EQ(cc.least[p], PointSet::singleton(3, p));
  EXPECT_TRUE(cc.space.intersection_closed());
  EXPECT_EQ(hypothesis_for_bound(table, 0, *table.space.find("1")), PointSet::of(3, {1, 2}));
}

TEST(ConsequenceClass, OneDecisionIsNested) {
  NumericLoss loss{{"d"}, {{XValue(0), XValue(1), XValue(1)}}};
  auto cc = build_consequence_class(loss.to_table(), Model::indexed(3));
  EXPECT_EQ(cc.space.cls().size(), 3u);  // {}, {1,2}, {0,1,2}
  EXPECT_EQ(cc.least[1], PointSet::of(3, {1, 2}));
}

TEST(OrderMeasurability, ReportsMissingHypothesis) {
  std::vector<PointSet> gens{PointSet::of(3, {0, 1}), PointSet::of(3, {2})};
  HypothesisSpace s(Model::indexed(3), HypothesisClass::union_closure(3, gens));
  try {
    require_order_measurable(seesaw().to_table(), s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OrderMeasurabilityViolation);
    EXPECT_NE(std::string(e.what()).find("P1"), std::string::npos);
  }
}

TEST(EConsequence, ValidKernelsBoundRandomLosses) {
  emtest::Rng rng(71);
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = emtest::uniform(rng, 1, 4);
    auto loss = random_loss(rng, n);
    auto table = loss.to_table();
    auto cc = build_consequence_class(table, Model::indexed(n));
    auto pa = emtest::random_assignment(rng, n, 3);
    auto k = emtest::random_capacity_kernel(rng, cc.space.cls(), pa, 1);
    auto r = check_econsequence_bound(k, pa, cc.space, table);
    EXPECT_TRUE(r.kernel_valid);
    EXPECT_EQ(r.pointwise_violations, 0u);
    EXPECT_TRUE(r.holds);
    EXPECT_TRUE(check_probability_bound(k, pa, cc.space, table, Rational(1, 4)).holds);
    EXPECT_TRUE(check_posthoc_consequence_bound(k, pa, cc.space, table,
                                                canonical_consequence_rule(k, cc.space, table)).holds);
    std::vector<std::size_t> rule(3);
    for (auto& d : rule) d = emtest::uniform(rng, 0, loss.decisions.size() - 1);
    EXPECT_TRUE(check_selected_decision_bound(k, pa, cc.space, table, rule).holds);
    auto g = check_grunwald_bound(k, pa, cc.space, loss);
    EXPECT_EQ(g.markov_violations, 0u);
    EXPECT_EQ(g.slack_violations, 0u);
    EXPECT_TRUE(g.holds);
  }
}

TEST(EConsequence, InvalidKernelIsDetected) {
  auto table = seesaw().to_table();
  auto cc = build_consequence_class(table, Model::indexed(3));
  ProbabilityAssignment pa({Pmf::uniform(2), Pmf::uniform(2), Pmf::uniform(2)});
  auto k = constant_kernel(cc.space.cls(), 2, 2);
  auto r = check_econsequence_bound(k, pa, cc.space, table);
  EXPECT_FALSE(r.kernel_valid);
  EXPECT_FALSE(r.holds);
}

TEST(IntegratedLoss, ThreeFormsAgreeForMeasures) {
  emtest::Rng rng(72);
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = emtest::uniform(rng, 1, 4);
    auto loss = random_loss(rng, n);
    auto cc = build_consequence_class(loss.to_table(), Model::indexed(n));
    auto e = closure_fast(emtest::random_capacity(rng, cc.space.cls()), cc.space);
    for (std::size_t d = 0; d < loss.decisions.size(); ++d) EXPECT_TRUE(e_integrated_loss(loss, e, cc, d).agree);
  }
}

TEST(IntegratedLoss, CapacityIsRefused) {
  auto cc = build_consequence_class(seesaw().to_table(), Model::indexed(3));
  std::vector<XValue> v(cc.space.cls().size(), XValue(1));
  v[0] = XValue::infinity();
  v.back() = XValue(1, 2);
  auto e = classify(v, cc.space.cls());
  ASSERT_FALSE(e.at_least(EClass::Measure));
  EXPECT_THROW(e_integrated_loss(seesaw(), e, cc, 0), Error);
}

TEST(Admissibility, StrongerEvidenceAgainstHighLoss) {
  auto table = seesaw().to_table();
  auto cc = build_consequence_class(table, Model::indexed(3));
  // Strong evidence against P3 makes "right" (loss 0 there) less attractive than "left".
  auto e = closure_fast(classify({XValue::infinity(), 1, 1, 100, 1, 1, 1, 1}, cc.space.cls()), cc.space);
  auto a = admissible_decisions(e, cc.space.cls(), table);
  EXPECT_TRUE(a.not_measurable.empty());
  EXPECT_EQ(a.geq.size(), 2u);
}

TEST(Optimality, TiesAndUniqueness) {
  auto loss = seesaw();
  auto oc = optimality_class(loss);
  EXPECT_EQ(oc.optimal_for[0], PointSet::of(3, {0, 1}));
  EXPECT_EQ(oc.optimal_for[1], PointSet::of(3, {1, 2}));
  EXPECT_THROW(optimal_decision_map(loss), Error);
  NumericLoss strict{{"a", "b"}, {{XValue(0), XValue(2)}, {XValue(1), XValue(0)}}};
  EXPECT_EQ(optimal_decision_map(strict), (std::vector<std::size_t>{0, 1}));
}

TEST(Mle, LikelihoodKernelAndChiSquare) {
  ProbabilityAssignment pa({Pmf({Rational(1, 2), Rational(1, 2)}), Pmf({Rational(1, 5), Rational(4, 5)}),
                            Pmf({Rational(9, 10), Rational(1, 10)})});
  auto loss = chi_square_loss(pa, {"P1", "P2", "P3"});
  for (std::size_t p = 0; p < 3; ++p) EXPECT_EQ(loss.entries[p][p], XValue(0));
  EXPECT_EQ(optimal_decision_map(loss), (std::vector<std::size_t>{0, 1, 2}));
  auto cls = HypothesisClass::power_set(3);
  auto k = likelihood_kernel(cls, pa, Pmf::uniform(2));
  // Most likely point has the least evidence against it.
  EXPECT_EQ(min_evidence_point(k, cls, 0), 2u);
  EXPECT_EQ(min_evidence_point(k, cls, 1), 1u);
}
