#include "emeasure/evidence.hpp"

#include <algorithm>
#include <bit>

#include "emeasure/errors.hpp"

namespace emeasure {

std::string_view to_string(EClass c) {
  switch (c) {
    case EClass::Function: return "function";
    case EClass::Capacity: return "capacity";
    case EClass::Measure: return "measure";
  }
  return "unknown";
}

bool is_antitone(std::span<const XValue> values, const HypothesisClass& cls) {
  for (const auto& [lo, hi] : cls.hasse()) {
    if (values[index(hi)] > values[index(lo)]) return false;
  }
  return true;
}

bool satisfies_union_law(std::span<const XValue> values, const HypothesisClass& cls) {
  if (!values[0].is_inf()) return false;
  const auto& m = cls.members();
  for (std::size_t i = 1; i < m.size(); ++i) {
    for (std::size_t j = i + 1; j < m.size(); ++j) {
      const HypId u = cls.id_of(m[i] | m[j]);
      if (values[index(u)] != std::min(values[i], values[j])) return false;
    }
  }
  return true;
}

EFunction classify(std::vector<XValue> values, const HypothesisClass& cls) {
  if (values.size() != cls.size()) {
    throw Error(ErrorCode::MissingEntry, "evidence table has " + std::to_string(values.size()) +
                                             " entries for " + std::to_string(cls.size()) +
                                             " hypotheses");
  }
  if (!values[0].is_inf()) {
    throw Error(ErrorCode::NotAnEFunction,
                "evidence against the empty hypothesis must be inf, got " + values[0].str());
  }
  EFunction e;
  e.class_ = EClass::Function;
  if (is_antitone(values, cls)) {
    e.class_ = satisfies_union_law(values, cls) ? EClass::Measure : EClass::Capacity;
  }
  e.values_ = std::move(values);
  return e;
}

EFunction dirac(const HypothesisClass& cls, std::size_t point) {
  if (point >= cls.width()) throw Error(ErrorCode::InvalidArgument, "dirac anchor out of range");
  std::vector<XValue> v;
  v.reserve(cls.size());
  for (const auto& h : cls.members()) v.push_back(h.contains(point) ? XValue::one() : XValue::infinity());
  return classify(std::move(v), cls);
}

EFunction one_measure(const HypothesisClass& cls) {
  std::vector<XValue> v(cls.size(), XValue::one());
  v[0] = XValue::infinity();
  return classify(std::move(v), cls);
}

EFunction closure_bruteforce(const EFunction& e, const HypothesisClass& cls, std::size_t max_members) {
  if (e.size() != cls.size()) throw Error(ErrorCode::MissingEntry, "evidence/class size mismatch");
  if (cls.size() > max_members) {
    throw Error(ErrorCode::CapExceeded,
                "brute-force closure enumerates every cover of " + std::to_string(cls.size()) +
                    " hypotheses (cap " + std::to_string(max_members) +
                    "); use closure_fast on an intersection-closed space");
  }
  // Covers range over subsets of the nonempty members; values are compared
  // by rank so the 2^n sweep touches only integers.
  const std::size_t n = cls.size() - 1;
  std::vector<XValue> distinct(e.values().begin() + 1, e.values().end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<std::uint32_t> rank(n);
  std::vector<std::uint64_t> bits(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& v = e.values()[i + 1];
    rank[i] = static_cast<std::uint32_t>(std::lower_bound(distinct.begin(), distinct.end(), v) - distinct.begin());
    bits[i] = cls.members()[i + 1].bits();
  }

  const std::size_t subsets = std::size_t{1} << n;
  std::vector<std::uint64_t> cover(subsets, 0);
  std::vector<std::uint32_t> min_rank(subsets, UINT32_MAX);  // UINT32_MAX encodes inf (empty cover)
  // best[h] = highest min-rank over covers of h; -1 = no nonempty cover.
  std::vector<std::int64_t> best(cls.size(), -1);
  for (std::size_t s = 1; s < subsets; ++s) {
    const std::size_t low = static_cast<std::size_t>(std::countr_zero(s));
    const std::size_t rest = s & (s - 1);
    cover[s] = cover[rest] | bits[low];
    min_rank[s] = std::min(min_rank[rest], rank[low]);
    for (std::size_t h = 1; h < cls.size(); ++h) {
      if ((cls.members()[h].bits() & ~cover[s]) == 0 && static_cast<std::int64_t>(min_rank[s]) > best[h]) {
        best[h] = min_rank[s];
      }
    }
  }
  std::vector<XValue> out(cls.size());
  out[0] = XValue::infinity();
  for (std::size_t h = 1; h < cls.size(); ++h) {
    // Every nonempty member covers itself, so best[h] >= 0.
    out[h] = distinct[static_cast<std::size_t>(best[h])];
  }
  return classify(std::move(out), cls);
}

EFunction closure_fast(const EFunction& e, const HypothesisSpace& space) {
  space.require_intersection_closed("closure_fast");
  const auto& cls = space.cls();
  if (e.size() != cls.size()) throw Error(ErrorCode::MissingEntry, "evidence/class size mismatch");
  if (!e.at_least(EClass::Capacity)) {
    throw Error(ErrorCode::NotACapacity, "closure_fast requires an E-capacity; use closure_bruteforce");
  }
  std::vector<XValue> at_point(space.width());
  for (std::size_t p = 0; p < space.width(); ++p) at_point[p] = e[space.least(p)];
  std::vector<XValue> out(cls.size());
  for (std::size_t h = 0; h < cls.size(); ++h) {
    XValue m = XValue::infinity();
    for (std::size_t p : cls.members()[h].points()) m = std::min(m, at_point[p]);
    out[h] = m;
  }
  return classify(std::move(out), cls);
}

EFunction closure(const EFunction& e, const HypothesisSpace& space, std::size_t max_members) {
  if (space.intersection_closed() && e.at_least(EClass::Capacity)) return closure_fast(e, space);
  return closure_bruteforce(e, space.cls(), max_members);
}

EFunction merge_convex(std::span<const EFunction> inputs, std::span<const Rational> weights,
                       const HypothesisClass& cls) {
  if (inputs.empty() || inputs.size() != weights.size()) {
    throw Error(ErrorCode::InvalidArgument, "merge needs one weight per input");
  }
  Rational total = 0;
  for (const auto& w : weights) {
    if (w < 0) throw Error(ErrorCode::InvalidArgument, "negative merge weight");
    total += w;
  }
  if (total != 1) throw Error(ErrorCode::InvalidArgument, "merge weights sum to " + rational_str(total) + ", not 1");
  for (const auto& e : inputs) {
    if (e.size() != cls.size()) throw Error(ErrorCode::MissingEntry, "evidence/class size mismatch");
    if (!e.at_least(EClass::Capacity)) throw Error(ErrorCode::NotACapacity, "merge inputs must be E-capacities");
  }
  std::vector<XValue> out(cls.size());
  for (std::size_t h = 0; h < cls.size(); ++h) {
    XValue acc;
    for (std::size_t i = 0; i < inputs.size(); ++i) acc += XValue(weights[i]) * inputs[i].values()[h];
    out[h] = acc;
  }
  EFunction merged = classify(std::move(out), cls);
  if (!merged.at_least(EClass::Capacity)) {
    throw Error(ErrorCode::NotACapacity, "merged table lost antitonicity");
  }
  return merged;
}

std::vector<XValue> extend_to_powerset(const EFunction& e, const HypothesisSpace& space, std::size_t max_points) {
  space.require_intersection_closed("extend_to_powerset");
  if (!e.at_least(EClass::Measure)) throw Error(ErrorCode::NotAMeasure, "extend_to_powerset requires an E-measure");
  if (space.width() > max_points) {
    throw Error(ErrorCode::CapExceeded, "power-set extension over " + std::to_string(space.width()) +
                                            " points exceeds the cap of " + std::to_string(max_points));
  }
  const std::size_t n = space.width();
  std::vector<XValue> at_point(n);
  for (std::size_t p = 0; p < n; ++p) at_point[p] = e[space.least(p)];
  std::vector<XValue> out(std::size_t{1} << n);
  out[0] = XValue::infinity();
  for (std::size_t a = 1; a < out.size(); ++a) {
    const std::size_t low = static_cast<std::size_t>(std::countr_zero(a));
    out[a] = std::min(out[a & (a - 1)], at_point[low]);
  }
  return out;
}

bool dominates(const EFunction& a, const EFunction& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::MissingEntry, "size mismatch in domination check");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.values()[i] < b.values()[i]) return false;
  }
  return true;
}

}  // namespace emeasure
