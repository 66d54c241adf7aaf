#include "emeasure/errors.hpp"
#include "emeasure/multiplicity.hpp"
#include "emeasure/table1.hpp"

#include <gtest/gtest.h>

#include "support/random_instances.hpp"

using namespace emeasure;

namespace {

SelectionRule random_rule(emtest::Rng& rng, const HypothesisClass& cls, std::size_t outcomes) {
  SelectionRule rule(outcomes);
  for (auto& s : rule) {
    for (auto h : cls.nonempty_ids())
      if (emtest::coin(rng, 1, 3)) s.push_back(h);
  }
  return rule;
}

}  // namespace

TEST(ToyTable, MatchesGoldenValues) {
  auto t = compute_toy_table(toy_instance(), Rational(1, 20));
  auto d = diff_tables(golden_toy_table(), t);
  for (const auto& m : d.mismatches) ADD_FAILURE() << m.row << "/" << m.column << ": " << m.expected << " vs " << m.actual;
  EXPECT_EQ(d.evidence_cells, 44u);
  EXPECT_EQ(d.evidence_matches, 44u);
  EXPECT_EQ(d.fsp_cells, 8u);
  EXPECT_EQ(d.fsp_matches, 8u);
  EXPECT_TRUE(t.fixed_point);
  EXPECT_EQ(t.s_star.size(), 3u);
}

TEST(ToyTable, RenderingIsStable) {
  auto a = render_table(compute_toy_table(toy_instance(), Rational(1, 20)));
  EXPECT_EQ(a, render_table(golden_toy_table()));
  EXPECT_NE(a.find("97.5"), std::string::npos);
}

TEST(ToyTable, DiffReportsPerturbedCell) {
  auto t = golden_toy_table();
  t.rows[1].post = XValue(181);
  auto d = diff_tables(golden_toy_table(), t);
  ASSERT_EQ(d.mismatches.size(), 1u);
  EXPECT_EQ(d.mismatches[0].row, "H_1");
  EXPECT_EQ(d.evidence_matches, 43u);
}

TEST(Ebh, BaseProcedure) {
  std::vector<XValue> ev{40, 1, 25, 3};
  EXPECT_EQ(ebh(ev, Rational(1, 10)), (std::vector<std::size_t>{0, 2}));
  std::vector<XValue> none{1, 2, 3};
  EXPECT_TRUE(ebh(none, Rational(1, 10)).empty());
  std::vector<XValue> inf{XValue::infinity(), 0};
  EXPECT_EQ(ebh(inf, Rational(1, 2)), (std::vector<std::size_t>{0}));
}

TEST(Ebh, ClosedNeverLosesRejections) {
  auto inst = toy_instance();
  auto base = ebh_procedure(inst.e, inst.space, inst.family, Rational(1, 20));
  auto closed = closed_ebh(inst.e, inst.space, inst.family, Rational(1, 20));
  EXPECT_EQ(base.rejected, (Selection{inst.family[0]}));
  EXPECT_EQ(closed.rejected, inst.family);
  EXPECT_TRUE(dominates(closed.binary, base.binary));
}

TEST(SelfConsistent, RejectionMapFixedPoint) {
  auto inst = toy_instance();
  auto sc = self_consistent_selection(inst.e, inst.space, inst.family, Rational(1, 20));
  ASSERT_TRUE(sc.fixed_point);
  EXPECT_EQ(rejection_map(inst.e, inst.space, inst.family, sc.selection, Rational(1, 20)), sc.selection);
}

TEST(SelfConsistent, ZeroEvidenceSelectsNothing) {
  // All evidence is zero: T(S) is empty for every S, and S = {} is a fixed point.
  auto inst = toy_instance(std::vector<XValue>(8, XValue(0)));
  auto sc = self_consistent_selection(inst.e, inst.space, inst.family, Rational(1, 20));
  EXPECT_TRUE(sc.fixed_point);
  EXPECT_TRUE(sc.selection.empty());
}

TEST(SelfConsistent, FamilyCap) {
  auto s = HypothesisSpace(Model::indexed(5), HypothesisClass::power_set(5));
  auto fam = s.cls().nonempty_ids();
  ASSERT_GT(fam.size(), 20u);
  EXPECT_THROW(self_consistent_selection(one_measure(s.cls()), s, fam, Rational(1, 20)), Error);
}

TEST(Fsp, Proportions) {
  auto cls = HypothesisClass::power_set(2);
  const HypId p1 = cls.id_of(PointSet::of(2, {0}));
  const HypId p2 = cls.id_of(PointSet::of(2, {1}));
  EXPECT_EQ(false_selection_proportion(cls, 0, {p1, p2, p2}), Rational(1, 2));
  EXPECT_EQ(false_selection_proportion(cls, 0, {}), Rational(0));
  EXPECT_EQ(false_selection_proportion(cls, 1, {p2}), Rational(1));
}

TEST(Fwe, AgreesWithValidityOnCapacities) {
  emtest::Rng rng(61);
  for (int i = 0; i < 120; ++i) {
    auto s = emtest::random_ic_space(rng);
    auto pa = emtest::random_assignment(rng, s.width(), 3);
    auto k = emtest::random_capacity_kernel(rng, s.cls(), pa, i % 2 ? Rational(1) : Rational(3, 2));
    auto r = check_fwe(k, pa, s);
    EXPECT_EQ(r.controlled, r.valid);
    EXPECT_TRUE(r.agree);
    ASSERT_TRUE(r.least_identity.has_value());
    EXPECT_TRUE(*r.least_identity);
  }
}

TEST(Fwe, RejectsNonCapacity) {
  HypothesisSpace s(Model::indexed(2), HypothesisClass::power_set(2));
  ProbabilityAssignment pa({Pmf::uniform(1), Pmf::uniform(1)});
  auto k = EKernel::classify({{XValue::infinity(), 1, 1, 2}}, s.cls());
  EXPECT_THROW(check_fwe(k, pa, s), Error);
}

TEST(Fer, FixedRulesAreControlledByValidKernels) {
  emtest::Rng rng(62);
  for (int i = 0; i < 120; ++i) {
    auto s = emtest::random_ic_space(rng);
    auto pa = emtest::random_assignment(rng, s.width(), 3);
    auto k = emtest::random_capacity_kernel(rng, s.cls(), pa, 1);
    auto r = check_fer(k, pa, s, random_rule(rng, s.cls(), 3));
    EXPECT_EQ(r.pointwise_violations, 0u);
    EXPECT_TRUE(r.premise_holds);
    EXPECT_TRUE(r.controls);
  }
}

TEST(Fer, UniformControlMatchesValidity) {
  emtest::Rng rng(63);
  for (int i = 0; i < 120; ++i) {
    auto s = emtest::random_ic_space(rng);
    auto pa = emtest::random_assignment(rng, s.width(), 3);
    auto k = emtest::random_capacity_kernel(rng, s.cls(), pa, i % 2 ? Rational(1) : Rational(3, 2));
    auto r = check_fer_uniform(k, pa, s);
    EXPECT_TRUE(r.agree);
    EXPECT_EQ(r.uniform_controls, r.valid);
    EXPECT_EQ(r.singletons_controlled, r.valid);
  }
}

TEST(Postprocess, DividesByFsp) {
  auto inst = toy_instance();
  const Selection s = inst.family;
  auto post = postprocess_selection(inst.e, inst.space, s);
  EXPECT_EQ(post[inst.cells[0]], XValue::infinity());
  EXPECT_EQ(post[inst.cells[1]], XValue(180));
  EXPECT_EQ(post[inst.family[0]], XValue(195, 2));
}

TEST(Phi, BuiltinsPassFlags) {
  auto cls = HypothesisClass::power_set(3);
  EXPECT_TRUE(verify_phi_flags(PhiSpec::sup_over_true(), cls).ok());
  EXPECT_TRUE(verify_phi_flags(PhiSpec::avg_over_selection(cls.nonempty_ids()), cls).ok());
  EXPECT_TRUE(verify_phi_flags(PhiSpec::sup_over_selections({{HypId{1}}, {HypId{2}, HypId{7}}}), cls).ok());
}

TEST(Phi, NonLocalCustomIsRefused) {
  HypothesisSpace s(Model::indexed(2), HypothesisClass::power_set(2));
  std::vector<std::vector<XValue>> w(2, std::vector<XValue>(4, XValue(1)));
  auto phi = PhiSpec::custom(w);
  auto flags = verify_phi_flags(phi, s.cls());
  EXPECT_FALSE(flags.local);
  ASSERT_TRUE(flags.counterexample);
  ProbabilityAssignment pa({Pmf::uniform(1), Pmf::uniform(1)});
  try {
    check_phi_validity(constant_kernel(s.cls(), 1, 1), pa, s, phi);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PhiFlagViolation);
  }
}

TEST(Phi, ValidKernelsControlEveryBuiltin) {
  emtest::Rng rng(64);
  for (int i = 0; i < 80; ++i) {
    auto s = emtest::random_ic_space(rng);
    auto pa = emtest::random_assignment(rng, s.width(), 3);
    auto k = emtest::random_capacity_kernel(rng, s.cls(), pa, 1);
    for (const auto& phi : {PhiSpec::sup_over_true(), PhiSpec::avg_over_selection(s.cls().nonempty_ids())}) {
      auto r = check_phi_validity(k, pa, s, phi);
      EXPECT_EQ(r.pointwise_violations, 0u) << to_string(phi.kind);
      EXPECT_TRUE(r.valid) << to_string(phi.kind);
    }
  }
}
