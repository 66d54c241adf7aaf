#pragma once

#include <span>
#include <vector>

#include "emeasure/hypothesis_space.hpp"
#include "emeasure/xvalue.hpp"

namespace emeasure {

/// Strength of the verified structure, ordered weakest to strongest.
enum class EClass { Function = 0, Capacity = 1, Measure = 2 };

std::string_view to_string(EClass c);

/// Evidence table over the members of a hypothesis class, indexed by HypId.
///
/// Constructed only through classify() or the named constructors, so the
/// stored class_of() is always the strongest verified structure.
class EFunction {
 public:
  const std::vector<XValue>& values() const noexcept { return values_; }
  const XValue& operator[](HypId id) const { return values_.at(index(id)); }
  std::size_t size() const noexcept { return values_.size(); }
  EClass class_of() const noexcept { return class_; }
  bool at_least(EClass c) const noexcept { return class_ >= c; }

  friend bool operator==(const EFunction& a, const EFunction& b) { return a.values_ == b.values_; }

 private:
  friend EFunction classify(std::vector<XValue> values, const HypothesisClass& cls);
  std::vector<XValue> values_;
  EClass class_ = EClass::Function;
};

/// Verifies a raw table. Throws MissingEntry on a size mismatch and
/// NotAnEFunction when the empty hypothesis is not assigned inf.
EFunction classify(std::vector<XValue> values, const HypothesisClass& cls);

bool is_antitone(std::span<const XValue> values, const HypothesisClass& cls);
/// Pairwise-union law e(H u H') = min(e(H), e(H')) plus e(empty) = inf.
bool satisfies_union_law(std::span<const XValue> values, const HypothesisClass& cls);

/// inf on hypotheses without P, 1 on those containing it.
EFunction dirac(const HypothesisClass& cls, std::size_t point);
/// 1 on every nonempty hypothesis, inf on the empty one.
EFunction one_measure(const HypothesisClass& cls);

/// ebar(H) = sup over covers T of H (T any subset of the nonempty members)
/// of min over T. Exponential in the member count; refuses classes larger
/// than `max_members`.
EFunction closure_bruteforce(const EFunction& e, const HypothesisClass& cls,
                             std::size_t max_members = Caps{}.max_bruteforce_members);

/// ebar(H) = min over P in H of e(H_P). Requires a capacity on an
/// intersection-closed space.
EFunction closure_fast(const EFunction& e, const HypothesisSpace& space);

/// Fast path when it applies, brute force otherwise.
EFunction closure(const EFunction& e, const HypothesisSpace& space,
                  std::size_t max_members = Caps{}.max_bruteforce_members);

/// Pointwise weighted sum of capacities. Weights must be non-negative and
/// sum to exactly one.
EFunction merge_convex(std::span<const EFunction> inputs, std::span<const Rational> weights,
                       const HypothesisClass& cls);

/// Canonical extension to every subset of the model, indexed by the subset's
/// bit pattern: e_ext(A) = min over P in A of e(H_P).
std::vector<XValue> extend_to_powerset(const EFunction& e, const HypothesisSpace& space,
                                       std::size_t max_points = Caps{}.max_powerset_points);

/// True when a dominates b pointwise.
bool dominates(const EFunction& a, const EFunction& b);

}  // namespace emeasure
