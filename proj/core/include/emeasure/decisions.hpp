#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "emeasure/integration.hpp"
#include "emeasure/kernels.hpp"

namespace emeasure {

/// Labelled consequences with a preorder; geq(a, b) reads "a is at least as
/// bad as b".
class ConsequenceSpace {
 public:
  /// pairs (a, b) meaning a >= b; reflexive pairs are implied. Throws
  /// NotAPreorder when the relation is not transitive.
  ConsequenceSpace(std::vector<std::string> labels, const std::vector<std::pair<std::size_t, std::size_t>>& pairs);
  /// Full matrix form, validated.
  ConsequenceSpace(std::vector<std::string> labels, std::vector<std::vector<bool>> geq);

  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  std::optional<std::size_t> find(const std::string& label) const;
  bool geq(std::size_t a, std::size_t b) const { return geq_.at(a).at(b); }

 private:
  void validate() const;
  std::vector<std::string> labels_;
  std::vector<std::vector<bool>> geq_;
};

/// entries[d][P]: the consequence of decision d when P is true.
struct ConsequenceTable {
  std::vector<std::string> decisions;
  ConsequenceSpace space;
  std::vector<std::vector<std::size_t>> entries;

  std::size_t points() const { return entries.empty() ? 0 : entries.front().size(); }
  void validate(std::size_t model_size) const;
};

/// entries[d][P] in [0, inf] with the natural order.
struct NumericLoss {
  std::vector<std::string> decisions;
  std::vector<std::vector<XValue>> entries;

  std::size_t points() const { return entries.empty() ? 0 : entries.front().size(); }
  void validate(std::size_t model_size) const;
  /// Consequence space of the distinct attained values ordered by >=.
  ConsequenceTable to_table() const;
  /// P -> L_P(d).
  std::vector<XValue> column(std::size_t d) const { return entries.at(d); }
};

struct ConsequenceClass {
  HypothesisSpace space;       ///< (model, H_L)
  Preorder order;              ///< P' >=_L P
  std::vector<PointSet> least; ///< H_{L_P}
  /// (d, c) pairs whose H_{d,c} is not a member; empty by construction.
  std::vector<std::pair<std::size_t, std::size_t>> missing;
};

ConsequenceClass build_consequence_class(const ConsequenceTable& table, const Model& model);

/// H_{d,c} = {P : L_P(d) >= c}.
PointSet hypothesis_for_bound(const ConsequenceTable& table, std::size_t d, std::size_t c);
/// H_l for the row of point q: {P' : L_P'(d) >= L_q(d) for every d}.
PointSet row_hypothesis(const ConsequenceTable& table, std::size_t q);

/// Throws OrderMeasurabilityViolation naming the first H_l missing from `cls`.
void require_order_measurable(const ConsequenceTable& table, const HypothesisSpace& space);

struct BoundEntry {
  std::size_t row = 0;  ///< the benchmark l = L_row
  std::size_t point = 0;
  XValue statistic;
  bool ok = false;
};

struct ConsequenceReport {
  bool kernel_valid = false;
  std::vector<BoundEntry> entries;
  std::size_t pointwise_checked = 0;
  std::size_t pointwise_violations = 0;  ///< sup_d e(H_{d,l(d)} | x) > e(H_l | x)
  bool holds = true;
};

/// For every benchmark row l and P in H_l: E^P[sup_d e(H_{d,l(d)} | X)] <= 1.
ConsequenceReport check_econsequence_bound(const EKernel& k, const ProbabilityAssignment& pa,
                                           const HypothesisSpace& space, const ConsequenceTable& table);

/// Coverage P(l(d) in C_alpha^d(X) for every d) >= 1 - alpha; the statistic
/// reported is the coverage.
ConsequenceReport check_probability_bound(const EKernel& k, const ProbabilityAssignment& pa,
                                          const HypothesisSpace& space, const ConsequenceTable& table,
                                          const Rational& alpha);

/// Data-dependent level per (benchmark row, outcome).
using ConsequenceAlphaRule = std::function<XValue(std::size_t row, std::size_t x)>;

/// alpha~ = 1 / sup_d e(H_{d,l(d)} | x).
ConsequenceAlphaRule canonical_consequence_rule(const EKernel& k, const HypothesisSpace& space,
                                                const ConsequenceTable& table);

ConsequenceReport check_posthoc_consequence_bound(const EKernel& k, const ProbabilityAssignment& pa,
                                                  const HypothesisSpace& space, const ConsequenceTable& table,
                                                  const ConsequenceAlphaRule& rule);

/// Evidence for a data-chosen decision d(x): E^P[e(H_{d(x), L_P(d(x))} | X)].
ConsequenceReport check_selected_decision_bound(const EKernel& k, const ProbabilityAssignment& pa,
                                                const HypothesisSpace& space, const ConsequenceTable& table,
                                                const std::vector<std::size_t>& decision_rule);

struct IntegratedLoss {
  XValue generic;     ///< Shilkret integral of P -> L_P(d)
  XValue via_least;   ///< sup_P L_P(d) / e(H_{L_P})
  XValue via_bound;   ///< sup_P L_P(d) / e(H_{d, L_P(d)})
  bool agree = false;
};

/// Requires an E-measure on H_L.
IntegratedLoss e_integrated_loss(const NumericLoss& loss, const EFunction& e, const ConsequenceClass& cc,
                                 std::size_t d);

/// Shilkret integral of P -> L_P(d) against a capacity on any class
/// containing H_L.
XValue integrated_loss(const NumericLoss& loss, const EFunction& e, const HypothesisClass& cls, std::size_t d);

struct GrunwaldReport {
  std::vector<XValue> statistic;     ///< per point
  std::vector<XValue> econsequence;  ///< per point, benchmark l = L_P
  std::size_t pointwise_checked = 0;
  std::size_t markov_violations = 0;  ///< L_P(d)/integral > e(H_{d,L_P(d)} | x)
  std::size_t slack_violations = 0;   ///< Grunwald statistic > E-consequence statistic
  bool holds = true;
};

GrunwaldReport check_grunwald_bound(const EKernel& k, const ProbabilityAssignment& pa, const HypothesisSpace& space,
                                    const NumericLoss& loss);

struct Admissibility {
  std::vector<std::vector<bool>> geq;  ///< geq[d][d']: d >=_e d'
  std::vector<std::size_t> admissible;
  /// (d, c) with H_{d,c} outside the class; those benchmarks are skipped.
  std::vector<std::pair<std::size_t, std::size_t>> not_measurable;
};

Admissibility admissible_decisions(const EFunction& e, const HypothesisClass& cls, const ConsequenceTable& table);

struct OptimalityClass {
  std::vector<PointSet> optimal_for;  ///< H_d, ties put P into several
  HypothesisClass cls;                ///< union closure of the H_d
};

OptimalityClass optimality_class(const NumericLoss& loss);

/// P -> unique argmin_d L_P(d). Throws InvalidArgument on a tie.
std::vector<std::size_t> optimal_decision_map(const NumericLoss& loss);

/// Chi-square divergence table L_P(Q) = sum_x (P(x) - Q(x))^2 / Q(x), with
/// decisions indexed by the model points. Zero exactly when Q = P.
NumericLoss chi_square_loss(const ProbabilityAssignment& pa, const std::vector<std::string>& point_labels);

/// argmin_P e({P} | x) over singleton hypotheses, ties to the lowest index.
std::size_t min_evidence_point(const EKernel& k, const HypothesisClass& cls, std::size_t x);

}  // namespace emeasure
