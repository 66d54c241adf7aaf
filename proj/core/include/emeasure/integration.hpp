#pragma once

#include <span>
#include <vector>

#include "emeasure/evidence.hpp"

namespace emeasure {

/// A non-negative function on model points whose super-level sets {f >= c},
/// c > 0, are all members of the bound class. Checked at construction.
class OrderMeasurableFn {
 public:
  /// Throws NotOrderMeasurable naming the first offending level c.
  OrderMeasurableFn(std::vector<XValue> values, const HypothesisClass& cls);

  /// The pointwise supremum of order-measurable functions (re-verified).
  static OrderMeasurableFn pointwise_sup(std::span<const OrderMeasurableFn> fs, const HypothesisClass& cls);
  /// Indicator of a member H.
  static OrderMeasurableFn indicator(const PointSet& h, const HypothesisClass& cls);

  const std::vector<XValue>& values() const noexcept { return values_; }
  const XValue& operator()(std::size_t point) const { return values_.at(point); }
  std::size_t width() const noexcept { return values_.size(); }

  /// Distinct attained positive values (inf included), ascending.
  std::vector<XValue> levels() const;
  /// {P : f(P) >= c}.
  PointSet level_set(const XValue& c) const;

  OrderMeasurableFn scaled(const Rational& a, const HypothesisClass& cls) const;

 private:
  std::vector<XValue> values_;
};

/// sup_{c>0} c / e({f >= c}), evaluated exactly at the attained levels of f.
XValue shilkret_integral(const OrderMeasurableFn& f, const EFunction& e, const HypothesisClass& cls);

/// sup_P f(P) / e(H_P). Requires an E-measure on an intersection-closed space.
XValue integral_least_true(const OrderMeasurableFn& f, const EFunction& e, const HypothesisSpace& space);

struct MarkovReport {
  XValue lhs;  ///< the integral
  XValue rhs;  ///< c / e({f >= c})
  bool holds = false;
};

/// Requires a finite c > 0.
MarkovReport e_markov_check(const OrderMeasurableFn& f, const EFunction& e, const HypothesisClass& cls,
                            const XValue& c);

/// The four expressions of the post-hoc Markov identity, each evaluated
/// independently:
///   integral of f
///   integral of sup_c c 1{f >= c}
///   sup_c integral of c 1{f >= c}
///   sup_c c / e({f >= c})
struct PosthocMarkovReport {
  XValue integral;
  XValue integral_of_sup;
  XValue sup_of_integrals;
  XValue threshold_sup;
  bool all_equal = false;
};

PosthocMarkovReport posthoc_markov_identity(const OrderMeasurableFn& f, const EFunction& e,
                                            const HypothesisClass& cls);

struct SupInterchangeReport {
  XValue integral_of_sup;
  XValue sup_of_integrals;
  bool geq = false;    ///< integral_of_sup >= sup_of_integrals
  bool equal = false;
};

SupInterchangeReport sup_interchange_check(std::span<const OrderMeasurableFn> fs, const EFunction& e,
                                           const HypothesisClass& cls);

}  // namespace emeasure
