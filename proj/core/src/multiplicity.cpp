#include "emeasure/multiplicity.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "emeasure/errors.hpp"

namespace emeasure {

namespace {

void require_capacity(const EKernel& k, std::string_view what) {
  if (!k.at_least(EClass::Capacity)) {
    throw Error(ErrorCode::NotACapacity, std::string(what) + " needs a capacity-valued kernel");
  }
}

Selection dedup(const Selection& s) {
  Selection out;
  for (HypId h : s) {
    if (std::find(out.begin(), out.end(), h) == out.end()) out.push_back(h);
  }
  return out;
}

void require_alpha(const Rational& alpha) {
  if (alpha <= 0 || alpha > 1) {
    throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1], got " + rational_str(alpha));
  }
}

XValue average_true(const HypothesisClass& cls, std::size_t point, const Selection& a, std::span<const XValue> eta) {
  const Selection s = dedup(a);
  XValue sum;
  for (HypId h : s) {
    if (cls.at(h).contains(point)) sum += eta[index(h)];
  }
  return XValue(Rational(1, static_cast<long long>(std::max<std::size_t>(s.size(), 1)))) * sum;
}

std::vector<XValue> true_indicator(const HypothesisClass& cls, std::size_t point) {
  std::vector<XValue> v;
  v.reserve(cls.size());
  for (const auto& h : cls.members()) v.push_back(h.contains(point) ? XValue::one() : XValue::zero());
  return v;
}

std::string render(std::span<const XValue> eta) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < eta.size(); ++i) os << (i ? "," : "") << eta[i].str();
  os << ']';
  return os.str();
}

}  // namespace

SelectionRule singleton_rule(HypId h, std::size_t outcomes) { return SelectionRule(outcomes, Selection{h}); }

XValue familywise_evidence(const EKernel& k, const HypothesisClass& cls, std::size_t point, std::size_t x) {
  XValue sup;
  for (std::size_t i = 1; i < cls.size(); ++i) {
    if (cls.members()[i].contains(point)) sup = std::max(sup, k(hyp_id(i), x));
  }
  return sup;
}

FweReport check_fwe(const EKernel& k, const ProbabilityAssignment& pa, const HypothesisSpace& space) {
  require_capacity(k, "familywise evidence control");
  const auto& cls = space.cls();
  FweReport r;
  r.valid = check_validity(k, pa, cls).valid;
  if (space.intersection_closed()) r.least_identity = true;
  for (std::size_t p = 0; p < cls.width(); ++p) {
    std::vector<XValue> fw(k.outcomes());
    for (std::size_t x = 0; x < k.outcomes(); ++x) {
      fw[x] = familywise_evidence(k, cls, p, x);
      if (r.least_identity && fw[x] != k(space.least(p), x)) r.least_identity = false;
    }
    r.statistic.push_back(pa[p].expectation(fw));
    if (r.statistic.back() > XValue::one()) {
      r.controlled = false;
      if (!r.witness) r.witness = p;
    }
  }
  r.agree = r.controlled == r.valid;
  return r;
}

Rational false_selection_proportion(const HypothesisClass& cls, std::size_t point, const Selection& s) {
  const Selection d = dedup(s);
  long long hits = 0;
  for (HypId h : d) hits += cls.at(h).contains(point) ? 1 : 0;
  return Rational(hits, static_cast<long long>(std::max<std::size_t>(d.size(), 1)));
}

FepFsp fep_fsp(const EKernel& k, const HypothesisClass& cls, std::size_t point, const Selection& s, std::size_t x) {
  const auto col = k.column(x).values();
  return FepFsp{average_true(cls, point, s, col), false_selection_proportion(cls, point, s)};
}

FerReport check_fer(const EKernel& k, const ProbabilityAssignment& pa, const HypothesisSpace& space,
                    const SelectionRule& rule) {
  require_capacity(k, "false evidence rate control");
  space.require_intersection_closed("false evidence rate control");
  if (rule.size() != k.outcomes()) throw Error(ErrorCode::WidthMismatch, "selection rule must cover every outcome");
  const auto& cls = space.cls();
  FerReport r;
  for (std::size_t p = 0; p < cls.width(); ++p) {
    std::vector<XValue> fep(k.outcomes());
    std::vector<XValue> prem(k.outcomes());
    for (std::size_t x = 0; x < k.outcomes(); ++x) {
      const auto [f, s] = fep_fsp(k, cls, p, rule[x], x);
      const XValue least = k(space.least(p), x);
      const XValue bound = XValue(s) * least;
      ++r.pointwise_checked;
      if (!(f <= bound && bound <= least)) ++r.pointwise_violations;
      fep[x] = f;
      prem[x] = bound;
    }
    r.fer.push_back(pa[p].expectation(fep));
    r.premise.push_back(pa[p].expectation(prem));
    r.controls = r.controls && r.fer.back() <= XValue::one();
    r.premise_holds = r.premise_holds && r.premise.back() <= XValue::one();
  }
  return r;
}

UniformFerReport check_fer_uniform(const EKernel& k, const ProbabilityAssignment& pa, const HypothesisSpace& space) {
  require_capacity(k, "false evidence rate control");
  space.require_intersection_closed("false evidence rate control");
  const auto& cls = space.cls();
  UniformFerReport r;
  r.valid = check_validity(k, pa, cls).valid;
  for (std::size_t p = 0; p < cls.width(); ++p) {
    std::vector<XValue> best(k.outcomes());
    for (std::size_t x = 0; x < k.outcomes(); ++x) best[x] = familywise_evidence(k, cls, p, x);
    r.sup_fer.push_back(pa[p].expectation(best));
    r.uniform_controls = r.uniform_controls && r.sup_fer.back() <= XValue::one();
  }
  for (HypId h : cls.nonempty_ids()) {
    for (std::size_t p : cls.at(h).points()) {
      std::vector<XValue> fep(k.outcomes());
      for (std::size_t x = 0; x < k.outcomes(); ++x) fep[x] = fep_fsp(k, cls, p, Selection{h}, x).fep;
      ValidityEntry e{h, p, pa[p].expectation(fep), false};
      e.ok = e.expectation <= XValue::one();
      r.singletons_controlled = r.singletons_controlled && e.ok;
      r.singleton.push_back(std::move(e));
    }
  }
  r.agree = r.valid == r.uniform_controls && r.valid == r.singletons_controlled;
  return r;
}

EFunction postprocess_selection(const EFunction& e, const HypothesisSpace& space, const Selection& s) {
  space.require_intersection_closed("selection post-processing");
  if (!e.at_least(EClass::Capacity)) throw Error(ErrorCode::NotACapacity, "post-processing needs an E-capacity");
  const auto& cls = space.cls();
  std::vector<XValue> inflated(cls.width());
  for (std::size_t p = 0; p < cls.width(); ++p) {
    inflated[p] = e[space.least(p)] / XValue(false_selection_proportion(cls, p, s));
  }
  std::vector<XValue> v(cls.size(), XValue::infinity());
  for (std::size_t i = 1; i < cls.size(); ++i) {
    for (std::size_t p : cls.members()[i].points()) v[i] = std::min(v[i], inflated[p]);
  }
  return classify(std::move(v), cls);
}

EKernel postprocess_selection(const EKernel& k, const HypothesisSpace& space, const SelectionRule& rule) {
  if (rule.size() != k.outcomes()) throw Error(ErrorCode::WidthMismatch, "selection rule must cover every outcome");
  std::vector<EFunction> cols;
  for (std::size_t x = 0; x < k.outcomes(); ++x) cols.push_back(postprocess_selection(k.column(x), space, rule[x]));
  return EKernel::from_columns(std::move(cols));
}

Selection rejection_map(const EFunction& e, const HypothesisSpace& space, const std::vector<HypId>& family,
                        const Selection& s, const Rational& alpha) {
  const EFunction post = postprocess_selection(e, space, s);
  const XValue threshold = reciprocal(XValue(alpha));
  Selection t;
  for (HypId g : family) {
    if (post[g] >= threshold) t.push_back(g);
  }
  return t;
}

SelfConsistent self_consistent_selection(const EFunction& e, const HypothesisSpace& space,
                                         const std::vector<HypId>& family, const Rational& alpha,
                                         std::size_t max_family) {
  if (alpha <= 0) throw Error(ErrorCode::InvalidArgument, "alpha must be positive");
  if (family.size() > max_family) {
    throw Error(ErrorCode::CapExceeded, "family of " + std::to_string(family.size()) +
                                            " hypotheses exceeds the subset-enumeration cap " +
                                            std::to_string(max_family));
  }
  if (dedup(family).size() != family.size()) throw Error(ErrorCode::InvalidArgument, "family lists a hypothesis twice");
  const std::size_t n = family.size();
  SelfConsistent out{{}, false, postprocess_selection(e, space, {}), 0};
  for (std::size_t size = n + 1; size-- > 0;) {
    std::vector<std::size_t> pick(size);
    for (std::size_t i = 0; i < size; ++i) pick[i] = i;
    while (true) {
      Selection s;
      for (std::size_t i : pick) s.push_back(family[i]);
      ++out.candidates_checked;
      if (rejection_map(e, space, family, s, alpha) == s) {
        out.selection = s;
        out.fixed_point = true;
        out.post = postprocess_selection(e, space, s);
        return out;
      }
      std::size_t i = size;
      while (i > 0 && pick[i - 1] == n - size + i - 1) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < size; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  return out;
}

std::vector<std::size_t> ebh(std::span<const XValue> evalues, const Rational& alpha) {
  require_alpha(alpha);
  const std::size_t n = evalues.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return evalues[a] > evalues[b]; });
  std::size_t keep = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    const XValue threshold(Rational(static_cast<long long>(n)) / (alpha * static_cast<long long>(k)));
    if (evalues[order[k - 1]] >= threshold) keep = k;
  }
  order.resize(keep);
  return order;
}

EFunction binary_rejection(const HypothesisSpace& space, const Selection& rejected, const Rational& alpha) {
  require_alpha(alpha);
  space.require_intersection_closed("binary rejection kernel");
  const auto& cls = space.cls();
  const XValue hit = reciprocal(XValue(alpha));
  std::vector<XValue> per_point(cls.width());
  for (std::size_t p = 0; p < cls.width(); ++p) {
    const PointSet& least = cls.at(space.least(p));
    for (HypId g : rejected) {
      if (least.subset_of(cls.at(g))) per_point[p] = hit;
    }
  }
  std::vector<XValue> v(cls.size(), XValue::infinity());
  for (std::size_t i = 1; i < cls.size(); ++i) {
    for (std::size_t p : cls.members()[i].points()) v[i] = std::min(v[i], per_point[p]);
  }
  return classify(std::move(v), cls);
}

EbhResult ebh_procedure(const EFunction& e, const HypothesisSpace& space, const std::vector<HypId>& family,
                        const Rational& alpha) {
  std::vector<XValue> ev;
  for (HypId g : family) ev.push_back(e[g]);
  auto pos = ebh(ev, alpha);
  std::sort(pos.begin(), pos.end());
  Selection rejected;
  for (std::size_t i : pos) rejected.push_back(family[i]);
  EFunction bin = binary_rejection(space, rejected, alpha);
  return EbhResult{std::move(rejected), std::move(bin)};
}

EbhResult closed_ebh(const EFunction& e, const HypothesisSpace& space, const std::vector<HypId>& family,
                     const Rational& alpha) {
  require_alpha(alpha);
  auto sc = self_consistent_selection(e, space, family, alpha);
  EFunction bin = binary_rejection(space, sc.selection, alpha);
  return EbhResult{std::move(sc.selection), std::move(bin)};
}

PhiSpec PhiSpec::sup_over_true() { return PhiSpec{}; }

PhiSpec PhiSpec::avg_over_selection(Selection a) {
  PhiSpec p;
  p.kind = Kind::AvgOverSelection;
  p.selection = std::move(a);
  return p;
}

PhiSpec PhiSpec::sup_over_selections(std::vector<Selection> f) {
  PhiSpec p;
  p.kind = Kind::SupOverSelections;
  p.selections = std::move(f);
  return p;
}

PhiSpec PhiSpec::custom(std::vector<std::vector<XValue>> w) {
  PhiSpec p;
  p.kind = Kind::Custom;
  p.weights = std::move(w);
  return p;
}

std::string_view to_string(PhiSpec::Kind k) {
  switch (k) {
    case PhiSpec::Kind::SupOverTrue: return "sup-over-true";
    case PhiSpec::Kind::AvgOverSelection: return "avg-over-selection";
    case PhiSpec::Kind::SupOverSelections: return "sup-over-selections";
    case PhiSpec::Kind::Custom: return "custom";
  }
  return "unknown";
}

XValue phi_eval(const PhiSpec& phi, const HypothesisClass& cls, std::size_t point, std::span<const XValue> eta) {
  if (eta.size() != cls.size()) throw Error(ErrorCode::WidthMismatch, "eta must cover every hypothesis");
  XValue out;
  switch (phi.kind) {
    case PhiSpec::Kind::SupOverTrue:
      for (std::size_t i = 1; i < cls.size(); ++i) {
        if (cls.members()[i].contains(point)) out = std::max(out, eta[i]);
      }
      break;
    case PhiSpec::Kind::AvgOverSelection:
      out = average_true(cls, point, phi.selection, eta);
      break;
    case PhiSpec::Kind::SupOverSelections:
      for (const auto& a : phi.selections) out = std::max(out, average_true(cls, point, a, eta));
      break;
    case PhiSpec::Kind::Custom:
      if (phi.weights.size() != cls.width() || phi.weights.at(point).size() != cls.size()) {
        throw Error(ErrorCode::WidthMismatch, "custom weight table must be points x hypotheses");
      }
      for (std::size_t i = 0; i < cls.size(); ++i) out = std::max(out, phi.weights[point][i] * eta[i]);
      break;
  }
  return out;
}

PhiFlags verify_phi_flags(const PhiSpec& phi, const HypothesisClass& cls, std::size_t samples) {
  static const XValue palette[] = {XValue(0), XValue(1, 2), XValue(1), XValue(2), XValue(7), XValue::infinity()};
  static const XValue scales[] = {XValue(0), XValue(1, 3), XValue(3)};
  std::mt19937_64 rng(0x5eedULL);
  std::uniform_int_distribution<std::size_t> pick(0, std::size(palette) - 1);
  PhiFlags f;
  auto fail = [&](bool& flag, const std::string& what) {
    if (flag) flag = false;
    if (!f.counterexample) f.counterexample = what;
  };
  for (std::size_t s = 0; s < samples; ++s) {
    std::vector<std::size_t> code(cls.size());
    std::vector<XValue> eta(cls.size());
    for (std::size_t i = 0; i < cls.size(); ++i) {
      code[i] = pick(rng);
      eta[i] = palette[code[i]];
    }
    const std::size_t j = std::uniform_int_distribution<std::size_t>(0, cls.size() - 1)(rng);
    auto lower = eta;
    lower[j] = palette[std::uniform_int_distribution<std::size_t>(0, code[j])(rng)];
    const XValue c = scales[s % std::size(scales)];
    auto scaled = eta;
    for (auto& v : scaled) v = c * v;
    ++f.samples;
    for (std::size_t p = 0; p < cls.width(); ++p) {
      const XValue base = phi_eval(phi, cls, p, eta);
      auto masked = eta;
      for (std::size_t i = 0; i < cls.size(); ++i) {
        if (!cls.members()[i].contains(p)) masked[i] = XValue::zero();
      }
      const std::string where = " at point " + std::to_string(p) + " for eta " + render(eta);
      if (phi_eval(phi, cls, p, masked) != base) fail(f.local, "not local" + where);
      if (phi_eval(phi, cls, p, scaled) != c * base) fail(f.homogeneous, "not homogeneous under c=" + c.str() + where);
      if (phi_eval(phi, cls, p, lower) > base) fail(f.monotone, "not monotone lowering entry " + std::to_string(j) + where);
    }
  }
  return f;
}

PhiReport check_phi_validity(const EKernel& k, const ProbabilityAssignment& pa, const HypothesisSpace& space,
                             const PhiSpec& phi) {
  require_capacity(k, "general multiplicity control");
  space.require_intersection_closed("general multiplicity control");
  const auto& cls = space.cls();
  PhiReport r;
  r.flags = verify_phi_flags(phi, cls);
  if (!r.flags.ok()) throw Error(ErrorCode::PhiFlagViolation, "refusing Phi (" + std::string(to_string(phi.kind)) +
                                                                  "): " + *r.flags.counterexample);
  for (std::size_t p = 0; p < cls.width(); ++p) {
    const XValue at_indicator = phi_eval(phi, cls, p, true_indicator(cls, p));
    std::vector<XValue> lhs(k.outcomes());
    std::vector<XValue> rhs(k.outcomes());
    for (std::size_t x = 0; x < k.outcomes(); ++x) {
      lhs[x] = phi_eval(phi, cls, p, k.column(x).values());
      rhs[x] = k(space.least(p), x) * at_indicator;
      ++r.pointwise_checked;
      if (lhs[x] > rhs[x]) ++r.pointwise_violations;
    }
    r.phi_expectation.push_back(pa[p].expectation(lhs));
    r.premise.push_back(pa[p].expectation(rhs));
    r.valid = r.valid && r.phi_expectation.back() <= XValue::one();
    r.premise_holds = r.premise_holds && r.premise.back() <= XValue::one();
  }
  return r;
}

}  // namespace emeasure
