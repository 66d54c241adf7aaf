#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "emeasure/kernels.hpp"

namespace emeasure {

/// Finite selection of hypotheses per outcome.
using Selection = std::vector<HypId>;
using SelectionRule = std::vector<Selection>;

/// The rule selecting the single hypothesis h at every outcome.
SelectionRule singleton_rule(HypId h, std::size_t outcomes);

/// sup over members containing `point` of e(H | x); 0 if none does.
XValue familywise_evidence(const EKernel& k, const HypothesisClass& cls, std::size_t point, std::size_t x);

struct FweReport {
  std::vector<XValue> statistic;  ///< per point: E^P[sup_{H containing P} e(H | X)]
  bool controlled = true;
  bool valid = true;               ///< hypothesis-wise validity, computed separately
  bool agree = true;
  std::optional<std::size_t> witness;  ///< first point with statistic > 1
  /// On intersection-closed spaces: familywise evidence equals e(H_P | x)
  /// everywhere. Absent otherwise.
  std::optional<bool> least_identity;
};

/// Requires a capacity-valued kernel.
FweReport check_fwe(const EKernel& k, const ProbabilityAssignment& pa, const HypothesisSpace& space);

struct FepFsp {
  XValue fep;
  Rational fsp;
};

/// Duplicates in `s` are ignored.
FepFsp fep_fsp(const EKernel& k, const HypothesisClass& cls, std::size_t point, const Selection& s, std::size_t x);

struct FerReport {
  std::size_t pointwise_checked = 0;
  std::size_t pointwise_violations = 0;
  std::vector<XValue> fer;      ///< per point: E^P[FEP]
  std::vector<XValue> premise;  ///< per point: E^P[FSP e(H_P | X)]
  bool premise_holds = true;
  bool controls = true;
};

/// Fixed selection rule. Requires a capacity kernel on an intersection-closed
/// space; asserts FEP <= FSP e(H_P) <= e(H_P) for every point and outcome.
FerReport check_fer(const EKernel& k, const ProbabilityAssignment& pa, const HypothesisSpace& space,
                    const SelectionRule& rule);

struct UniformFerReport {
  /// per point: the supremum of the false evidence rate over all selection
  /// rules, which picks the strongest true hypothesis at every outcome.
  std::vector<XValue> sup_fer;
  /// per nonempty H and P in H: FER of the singleton rule {H}.
  std::vector<ValidityEntry> singleton;
  bool singletons_controlled = true;
  bool uniform_controls = true;
  bool valid = true;
  bool agree = true;
};

UniformFerReport check_fer_uniform(const EKernel& k, const ProbabilityAssignment& pa, const HypothesisSpace& space);

/// e^S(H_P) = e(H_P) / FSP_P^S, extended to the class by closure. Works on a
/// single outcome's evidence.
EFunction postprocess_selection(const EFunction& e, const HypothesisSpace& space, const Selection& s);
EKernel postprocess_selection(const EKernel& k, const HypothesisSpace& space, const SelectionRule& rule);

/// FSP_P^S for a single selection.
Rational false_selection_proportion(const HypothesisClass& cls, std::size_t point, const Selection& s);

struct SelfConsistent {
  Selection selection;  ///< in the family's order
  bool fixed_point = false;
  EFunction post;       ///< e^{S*}
  std::size_t candidates_checked = 0;
};

/// T(S) = {G in family : e^S(G) >= 1/alpha}. Searches subsets of the family
/// by descending size, lexicographically within a size, and returns the first
/// fixed point. When none exists the selection is empty and fixed_point is
/// false.
SelfConsistent self_consistent_selection(const EFunction& e, const HypothesisSpace& space,
                                         const std::vector<HypId>& family, const Rational& alpha,
                                         std::size_t max_family = Caps{}.max_family_size);

/// T(S) for an explicit selection.
Selection rejection_map(const EFunction& e, const HypothesisSpace& space, const std::vector<HypId>& family,
                        const Selection& s, const Rational& alpha);

/// Positions in `evalues` rejected by the base E-BH procedure at level
/// alpha, in descending evidence order (ties by position).
std::vector<std::size_t> ebh(std::span<const XValue> evalues, const Rational& alpha);

/// 1/alpha on every least hypothesis contained in a rejected hypothesis,
/// 0 on the others, extended by closure.
EFunction binary_rejection(const HypothesisSpace& space, const Selection& rejected, const Rational& alpha);

struct EbhResult {
  Selection rejected;
  EFunction binary;
};

EbhResult ebh_procedure(const EFunction& e, const HypothesisSpace& space, const std::vector<HypId>& family,
                        const Rational& alpha);
EbhResult closed_ebh(const EFunction& e, const HypothesisSpace& space, const std::vector<HypId>& family,
                     const Rational& alpha);

/// Disutility of false evidence Phi_P(eta), eta indexed by HypId.
struct PhiSpec {
  enum class Kind { SupOverTrue, AvgOverSelection, SupOverSelections, Custom };
  Kind kind = Kind::SupOverTrue;
  Selection selection;                         ///< AvgOverSelection
  std::vector<Selection> selections;           ///< SupOverSelections
  std::vector<std::vector<XValue>> weights;    ///< Custom: sup_H w[P][H] eta(H)

  static PhiSpec sup_over_true();
  static PhiSpec avg_over_selection(Selection a);
  static PhiSpec sup_over_selections(std::vector<Selection> f);
  static PhiSpec custom(std::vector<std::vector<XValue>> w);
};

std::string_view to_string(PhiSpec::Kind k);

XValue phi_eval(const PhiSpec& phi, const HypothesisClass& cls, std::size_t point, std::span<const XValue> eta);

struct PhiFlags {
  bool local = true;
  bool homogeneous = true;
  bool monotone = true;
  std::size_t samples = 0;
  std::optional<std::string> counterexample;
  bool ok() const { return local && homogeneous && monotone; }
};

/// Checks the three flags on a deterministic grid of eta tables.
PhiFlags verify_phi_flags(const PhiSpec& phi, const HypothesisClass& cls, std::size_t samples = 64);

struct PhiReport {
  PhiFlags flags;
  std::size_t pointwise_checked = 0;
  std::size_t pointwise_violations = 0;   ///< Phi_P(e) > e(H_P) Phi_P(1_P)
  std::vector<XValue> phi_expectation;    ///< per point: E^P[Phi_P(e(. | X))]
  std::vector<XValue> premise;            ///< per point: E^P[e(H_P | X) Phi_P(1_P)]
  bool premise_holds = true;
  bool valid = true;
};

/// Throws PhiFlagViolation with the failing sample when a flag fails.
PhiReport check_phi_validity(const EKernel& k, const ProbabilityAssignment& pa, const HypothesisSpace& space,
                             const PhiSpec& phi);

}  // namespace emeasure
