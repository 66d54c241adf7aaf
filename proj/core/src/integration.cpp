#include "emeasure/integration.hpp"

#include <algorithm>

#include "emeasure/errors.hpp"

namespace emeasure {

OrderMeasurableFn::OrderMeasurableFn(std::vector<XValue> values, const HypothesisClass& cls)
    : values_(std::move(values)) {
  if (values_.size() != cls.width()) {
    throw Error(ErrorCode::WidthMismatch, "function has " + std::to_string(values_.size()) +
                                              " values for a model of " + std::to_string(cls.width()) +
                                              " points");
  }
  // Between consecutive attained levels the super-level set is constant, so
  // checking the attained positive levels covers every c > 0.
  for (const auto& c : levels()) {
    const PointSet s = level_set(c);
    if (!cls.contains(s)) {
      throw Error(ErrorCode::NotOrderMeasurable,
                  "level set {f >= " + c.str() + "} = " + s.str() + " is not a member of the class");
    }
  }
}

OrderMeasurableFn OrderMeasurableFn::pointwise_sup(std::span<const OrderMeasurableFn> fs,
                                                   const HypothesisClass& cls) {
  std::vector<XValue> v(cls.width(), XValue::zero());
  for (const auto& f : fs) {
    if (f.width() != cls.width()) throw Error(ErrorCode::WidthMismatch, "function width mismatch");
    for (std::size_t p = 0; p < v.size(); ++p) v[p] = std::max(v[p], f(p));
  }
  return OrderMeasurableFn(std::move(v), cls);
}

OrderMeasurableFn OrderMeasurableFn::indicator(const PointSet& h, const HypothesisClass& cls) {
  std::vector<XValue> v(cls.width(), XValue::zero());
  for (std::size_t p : h.points()) v[p] = XValue::one();
  return OrderMeasurableFn(std::move(v), cls);
}

std::vector<XValue> OrderMeasurableFn::levels() const {
  std::vector<XValue> out;
  for (const auto& v : values_) {
    if (!v.is_zero()) out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

PointSet OrderMeasurableFn::level_set(const XValue& c) const {
  std::uint64_t bits = 0;
  for (std::size_t p = 0; p < values_.size(); ++p) {
    if (values_[p] >= c) bits |= std::uint64_t{1} << p;
  }
  return PointSet(values_.size(), bits);
}

OrderMeasurableFn OrderMeasurableFn::scaled(const Rational& a, const HypothesisClass& cls) const {
  std::vector<XValue> v;
  v.reserve(values_.size());
  for (const auto& x : values_) v.push_back(XValue(a) * x);
  return OrderMeasurableFn(std::move(v), cls);
}

namespace {

void require_bound(const OrderMeasurableFn& f, const EFunction& e, const HypothesisClass& cls) {
  if (f.width() != cls.width()) throw Error(ErrorCode::WidthMismatch, "function/class width mismatch");
  if (e.size() != cls.size()) throw Error(ErrorCode::MissingEntry, "evidence/class size mismatch");
}

}  // namespace

XValue shilkret_integral(const OrderMeasurableFn& f, const EFunction& e, const HypothesisClass& cls) {
  require_bound(f, e, cls);
  XValue best = XValue::zero();  // sup of the empty set
  for (const auto& c : f.levels()) {
    best = std::max(best, c / e[cls.id_of(f.level_set(c))]);
  }
  return best;
}

XValue integral_least_true(const OrderMeasurableFn& f, const EFunction& e, const HypothesisSpace& space) {
  require_bound(f, e, space.cls());
  space.require_intersection_closed("integral_least_true");
  if (!e.at_least(EClass::Measure)) throw Error(ErrorCode::NotAMeasure, "integral_least_true requires an E-measure");
  XValue best = XValue::zero();
  for (std::size_t p = 0; p < space.width(); ++p) best = std::max(best, f(p) / e[space.least(p)]);
  return best;
}

MarkovReport e_markov_check(const OrderMeasurableFn& f, const EFunction& e, const HypothesisClass& cls,
                            const XValue& c) {
  if (c.is_zero() || c.is_inf()) {
    throw Error(ErrorCode::InvalidArgument, "E-Markov threshold must be finite and positive");
  }
  MarkovReport r;
  r.lhs = shilkret_integral(f, e, cls);
  r.rhs = c / e[cls.id_of(f.level_set(c))];
  r.holds = r.lhs >= r.rhs;
  return r;
}

PosthocMarkovReport posthoc_markov_identity(const OrderMeasurableFn& f, const EFunction& e,
                                            const HypothesisClass& cls) {
  require_bound(f, e, cls);
  PosthocMarkovReport r;
  r.integral = shilkret_integral(f, e, cls);

  // The family c 1{f >= c} over attained levels c; other c are dominated by
  // the next attained level and contribute nothing new to either supremum.
  std::vector<OrderMeasurableFn> steps;
  for (const auto& c : f.levels()) {
    std::vector<XValue> v(f.width(), XValue::zero());
    for (std::size_t p = 0; p < f.width(); ++p) {
      if (f(p) >= c) v[p] = c;
    }
    steps.emplace_back(std::move(v), cls);
  }
  r.integral_of_sup = shilkret_integral(OrderMeasurableFn::pointwise_sup(steps, cls), e, cls);

  r.sup_of_integrals = XValue::zero();
  for (const auto& s : steps) r.sup_of_integrals = std::max(r.sup_of_integrals, shilkret_integral(s, e, cls));

  r.threshold_sup = XValue::zero();
  for (const auto& c : f.levels()) {
    r.threshold_sup = std::max(r.threshold_sup, c * reciprocal(e[cls.id_of(f.level_set(c))]));
  }
  r.all_equal = r.integral == r.integral_of_sup && r.integral == r.sup_of_integrals &&
                r.integral == r.threshold_sup;
  return r;
}

SupInterchangeReport sup_interchange_check(std::span<const OrderMeasurableFn> fs, const EFunction& e,
                                           const HypothesisClass& cls) {
  SupInterchangeReport r;
  r.integral_of_sup = shilkret_integral(OrderMeasurableFn::pointwise_sup(fs, cls), e, cls);
  r.sup_of_integrals = XValue::zero();
  for (const auto& f : fs) r.sup_of_integrals = std::max(r.sup_of_integrals, shilkret_integral(f, e, cls));
  r.geq = r.integral_of_sup >= r.sup_of_integrals;
  r.equal = r.integral_of_sup == r.sup_of_integrals;
  return r;
}

}  // namespace emeasure
