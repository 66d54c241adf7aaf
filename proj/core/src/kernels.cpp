#include "emeasure/kernels.hpp"

#include <algorithm>
#include <unordered_set>

#include "emeasure/errors.hpp"

namespace emeasure {

namespace {

void require_shape(const EKernel& k, const ProbabilityAssignment& pa, const HypothesisClass& cls) {
  if (k.hypotheses() != cls.size()) {
    throw Error(ErrorCode::WidthMismatch, "kernel has " + std::to_string(k.hypotheses()) +
                                              " hypotheses, class has " + std::to_string(cls.size()));
  }
  if (pa.points() != cls.width()) {
    throw Error(ErrorCode::WidthMismatch, "probability assignment covers " + std::to_string(pa.points()) +
                                              " points, model has " + std::to_string(cls.width()));
  }
  if (pa.outcomes() != k.outcomes()) {
    throw Error(ErrorCode::WidthMismatch, "distributions have " + std::to_string(pa.outcomes()) +
                                              " outcomes, kernel has " + std::to_string(k.outcomes()));
  }
}

XValue posthoc_term(const XValue& e, const XValue& level) {
  return e >= reciprocal(level) ? reciprocal(level) : XValue::zero();
}

}  // namespace

SampleSpace::SampleSpace(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw Error(ErrorCode::InvalidArgument, "sample space needs at least one outcome");
  std::unordered_set<std::string> seen;
  for (const auto& l : labels_) {
    if (!seen.insert(l).second) throw Error(ErrorCode::InvalidArgument, "duplicate outcome label '" + l + "'");
  }
}

SampleSpace SampleSpace::indexed(std::size_t size, const std::string& prefix) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < size; ++i) labels.push_back(prefix + std::to_string(i + 1));
  return SampleSpace(std::move(labels));
}

std::optional<std::size_t> SampleSpace::find(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - labels_.begin());
}

Pmf::Pmf(std::vector<Rational> mass) : mass_(std::move(mass)) {
  if (mass_.empty()) throw Error(ErrorCode::InvalidArgument, "distribution over zero outcomes");
  Rational total = 0;
  for (const auto& m : mass_) {
    if (m < 0) throw Error(ErrorCode::InvalidArgument, "negative probability mass " + rational_str(m));
    total += m;
  }
  if (total != 1) throw Error(ErrorCode::InvalidArgument, "masses sum to " + rational_str(total) + ", not 1");
}

Pmf Pmf::uniform(std::size_t outcomes) {
  if (outcomes == 0) throw Error(ErrorCode::InvalidArgument, "distribution over zero outcomes");
  return Pmf(std::vector<Rational>(outcomes, Rational(1, static_cast<long long>(outcomes))));
}

XValue Pmf::expectation(std::span<const XValue> values) const {
  if (values.size() != mass_.size()) {
    throw Error(ErrorCode::WidthMismatch, "expectation of a variable over " + std::to_string(values.size()) +
                                              " outcomes under a distribution over " +
                                              std::to_string(mass_.size()));
  }
  XValue sum;
  for (std::size_t x = 0; x < mass_.size(); ++x) sum += XValue(mass_[x]) * values[x];
  return sum;
}

ProbabilityAssignment::ProbabilityAssignment(std::vector<Pmf> per_point) : pmfs_(std::move(per_point)) {
  if (pmfs_.empty()) throw Error(ErrorCode::InvalidArgument, "probability assignment without points");
  for (const auto& p : pmfs_) {
    if (p.size() != pmfs_.front().size()) {
      throw Error(ErrorCode::WidthMismatch, "distributions disagree on the number of outcomes");
    }
  }
}

EKernel EKernel::from_columns(std::vector<EFunction> columns) {
  if (columns.empty()) throw Error(ErrorCode::InvalidArgument, "kernel over zero outcomes");
  EKernel k;
  for (const auto& c : columns) {
    if (c.size() != columns.front().size()) {
      throw Error(ErrorCode::MissingEntry, "kernel columns have different lengths");
    }
    k.class_ = std::min(k.class_, c.class_of());
  }
  k.columns_ = std::move(columns);
  return k;
}

EKernel EKernel::classify(const std::vector<std::vector<XValue>>& table, const HypothesisClass& cls) {
  std::vector<EFunction> cols;
  cols.reserve(table.size());
  for (const auto& col : table) cols.push_back(emeasure::classify(col, cls));
  return from_columns(std::move(cols));
}

std::vector<XValue> EKernel::variable(HypId h) const {
  std::vector<XValue> v;
  v.reserve(columns_.size());
  for (const auto& c : columns_) v.push_back(c[h]);
  return v;
}

EKernel likelihood_kernel(const HypothesisClass& cls, const ProbabilityAssignment& pa, const Pmf& lambda) {
  if (pa.points() != cls.width()) throw Error(ErrorCode::WidthMismatch, "assignment/model width mismatch");
  if (lambda.size() != pa.outcomes()) throw Error(ErrorCode::WidthMismatch, "reference/outcome mismatch");
  std::vector<std::vector<XValue>> table(lambda.size());
  for (std::size_t x = 0; x < lambda.size(); ++x) {
    auto& col = table[x];
    col.reserve(cls.size());
    for (const auto& h : cls.members()) {
      XValue v = XValue::infinity();
      for (std::size_t p : h.points()) v = std::min(v, XValue(lambda[x]) / XValue(pa[p][x]));
      col.push_back(v);
    }
  }
  return EKernel::classify(table, cls);
}

EKernel constant_kernel(const HypothesisClass& cls, std::size_t outcomes, const XValue& c) {
  std::vector<XValue> col(cls.size(), c);
  col[0] = XValue::infinity();
  return EKernel::classify(std::vector<std::vector<XValue>>(outcomes, col), cls);
}

std::optional<ValidityEntry> ValidityReport::first_violation() const {
  for (const auto& e : entries) {
    if (!e.ok) return e;
  }
  return std::nullopt;
}

ValidityReport check_validity(const EKernel& k, const ProbabilityAssignment& pa, const HypothesisClass& cls) {
  require_shape(k, pa, cls);
  ValidityReport r;
  for (HypId h : cls.nonempty_ids()) {
    const auto var = k.variable(h);
    for (std::size_t p : cls.at(h).points()) {
      ValidityEntry e{h, p, pa[p].expectation(var), false};
      e.ok = e.expectation <= XValue::one();
      r.valid = r.valid && e.ok;
      r.entries.push_back(std::move(e));
    }
  }
  return r;
}

EKernel close_kernel(const EKernel& k, const HypothesisSpace& space) {
  std::vector<EFunction> cols;
  cols.reserve(k.outcomes());
  for (const auto& c : k.columns()) cols.push_back(closure_fast(c, space));
  return EKernel::from_columns(std::move(cols));
}

EKernel merge_kernels(std::span<const EKernel> kernels, std::span<const Rational> weights,
                      const HypothesisClass& cls) {
  if (kernels.empty()) throw Error(ErrorCode::InvalidArgument, "nothing to merge");
  std::vector<EFunction> cols;
  for (std::size_t x = 0; x < kernels.front().outcomes(); ++x) {
    std::vector<EFunction> slice;
    for (const auto& k : kernels) {
      if (k.outcomes() != kernels.front().outcomes()) {
        throw Error(ErrorCode::WidthMismatch, "merged kernels disagree on outcomes");
      }
      slice.push_back(k.column(x));
    }
    cols.push_back(merge_convex(slice, weights, cls));
  }
  return EKernel::from_columns(std::move(cols));
}

std::vector<HypId> confidence_set(const EKernel& k, const Rational& alpha, std::size_t x) {
  if (alpha <= 0 || alpha > 1) {
    throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1], got " + rational_str(alpha));
  }
  const XValue threshold = reciprocal(XValue(alpha));
  std::vector<HypId> out;
  const auto& col = k.column(x);
  for (std::size_t i = 0; i < col.size(); ++i) {
    if (col.values()[i] < threshold) out.push_back(hyp_id(i));
  }
  return out;
}

AlphaRule constant_rule(const Rational& alpha) {
  const XValue a(alpha);
  return [a](HypId, std::size_t) { return a; };
}

AlphaRule canonical_rule(const EKernel& k) {
  return [&k](HypId h, std::size_t x) { return reciprocal(k(h, x)); };
}

PosthocReport check_posthoc_validity(const EKernel& k, const ProbabilityAssignment& pa,
                                     const HypothesisClass& cls, const AlphaRule& rule) {
  require_shape(k, pa, cls);
  PosthocReport r;
  for (HypId h : cls.nonempty_ids()) {
    std::vector<XValue> stat(k.outcomes());
    for (std::size_t x = 0; x < k.outcomes(); ++x) stat[x] = posthoc_term(k(h, x), rule(h, x));
    for (std::size_t p : cls.at(h).points()) {
      ValidityEntry e{h, p, pa[p].expectation(stat), false};
      e.ok = e.expectation <= XValue::one();
      r.holds = r.holds && e.ok;
      r.entries.push_back(std::move(e));
    }
  }
  return r;
}

std::optional<PosthocWitness> search_posthoc_violation(const EKernel& k, const ProbabilityAssignment& pa,
                                                       const HypothesisClass& cls,
                                                       std::span<const Rational> alpha_grid) {
  require_shape(k, pa, cls);
  std::optional<PosthocWitness> best;
  for (HypId h : cls.nonempty_ids()) {
    std::vector<XValue> grid;
    for (const auto& a : alpha_grid) grid.emplace_back(a);
    for (std::size_t x = 0; x < k.outcomes(); ++x) grid.push_back(reciprocal(k(h, x)));
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    // The statistic is a sum of per-outcome terms, so the best rule in the
    // product family picks the best level for each outcome independently.
    std::vector<XValue> levels(k.outcomes());
    std::vector<XValue> terms(k.outcomes());
    for (std::size_t x = 0; x < k.outcomes(); ++x) {
      levels[x] = grid.front();
      terms[x] = posthoc_term(k(h, x), grid.front());
      for (const auto& a : grid) {
        const XValue t = posthoc_term(k(h, x), a);
        if (t > terms[x]) {
          terms[x] = t;
          levels[x] = a;
        }
      }
    }
    for (std::size_t p : cls.at(h).points()) {
      const XValue s = pa[p].expectation(terms);
      if (s > XValue::one() && (!best || s > best->statistic)) {
        best = PosthocWitness{h, p, levels, s};
      }
    }
  }
  return best;
}

namespace {

EKernel product_kernel(const EFunction& prior, const EKernel& k, const HypothesisClass& cls) {
  if (prior.size() != cls.size() || k.hypotheses() != cls.size()) {
    throw Error(ErrorCode::WidthMismatch, "prior, kernel and class sizes differ");
  }
  if (!prior.at_least(EClass::Capacity)) throw Error(ErrorCode::NotACapacity, "prior is not an E-capacity");
  if (!k.at_least(EClass::Capacity)) throw Error(ErrorCode::NotACapacity, "kernel is not capacity-valued");
  std::vector<std::vector<XValue>> table(k.outcomes(), std::vector<XValue>(cls.size()));
  for (std::size_t x = 0; x < k.outcomes(); ++x) {
    for (std::size_t i = 0; i < cls.size(); ++i) table[x][i] = prior.values()[i] * k(hyp_id(i), x);
  }
  return EKernel::classify(table, cls);
}

template <class BoundFn>
PosteriorReport posterior_report(const EKernel& post, const EKernel& k, const ProbabilityAssignment& pa,
                                 const HypothesisClass& cls, BoundFn bound) {
  PosteriorReport r;
  r.kernel_valid = check_validity(k, pa, cls).valid;
  for (HypId h : cls.nonempty_ids()) {
    const auto var = post.variable(h);
    for (std::size_t p : cls.at(h).points()) {
      PosteriorEntry e{h, p, pa[p].expectation(var), bound(h, p), false};
      e.ok = e.expectation <= e.bound;
      r.holds = r.holds && e.ok;
      r.entries.push_back(std::move(e));
    }
  }
  return r;
}

}  // namespace

Posterior eposterior_raw(const EFunction& prior, const EKernel& k, const ProbabilityAssignment& pa,
                         const HypothesisClass& cls) {
  require_shape(k, pa, cls);
  EKernel post = product_kernel(prior, k, cls);
  auto report = posterior_report(post, k, pa, cls, [&](HypId h, std::size_t) { return prior[h]; });
  return Posterior{std::move(post), std::move(report)};
}

Posterior eposterior_closed(const EFunction& prior, const EKernel& k, const ProbabilityAssignment& pa,
                            const HypothesisSpace& space) {
  const auto& cls = space.cls();
  require_shape(k, pa, cls);
  space.require_intersection_closed("closed E-posterior");
  EKernel post = close_kernel(product_kernel(prior, k, cls), space);
  auto report = posterior_report(post, k, pa, cls,
                                 [&](HypId, std::size_t p) { return prior[space.least(p)]; });
  return Posterior{std::move(post), std::move(report)};
}

PredictiveReport check_predictive_validity(const EKernel& k, const ProbabilityAssignment& pa,
                                           const HypothesisSpace& space_over_outcomes) {
  const auto& cls = space_over_outcomes.cls();
  if (cls.width() != k.outcomes()) {
    throw Error(ErrorCode::WidthMismatch, "predictive space has " + std::to_string(cls.width()) +
                                              " points but the kernel has " + std::to_string(k.outcomes()) +
                                              " outcomes");
  }
  if (k.hypotheses() != cls.size()) throw Error(ErrorCode::WidthMismatch, "kernel/class size mismatch");
  if (pa.outcomes() != k.outcomes()) throw Error(ErrorCode::WidthMismatch, "distribution/outcome mismatch");
  space_over_outcomes.require_intersection_closed("predictive validity");

  PredictiveReport r;
  for (std::size_t x = 0; x < k.outcomes(); ++x) {
    XValue sup;
    for (std::size_t i = 1; i < cls.size(); ++i) {
      if (cls.members()[i].contains(x)) sup = std::max(sup, k(hyp_id(i), x));
    }
    r.sup_true.push_back(sup);
    r.least_true.push_back(k(space_over_outcomes.least(x), x));
    r.sup_identity = r.sup_identity && sup == r.least_true.back();
  }
  for (std::size_t q = 0; q < pa.points(); ++q) {
    r.sup_expectation.push_back(pa[q].expectation(r.sup_true));
    r.least_expectation.push_back(pa[q].expectation(r.least_true));
    r.valid = r.valid && r.sup_expectation.back() <= XValue::one();
    r.least_valid = r.least_valid && r.least_expectation.back() <= XValue::one();
  }
  return r;
}

Pushforward pushforward_kernel(const EKernel& k, const HypothesisClass& source, std::span<const std::size_t> f,
                               const HypothesisClass& target, const ProbabilityAssignment& pa) {
  if (f.size() != source.width()) throw Error(ErrorCode::WidthMismatch, "map must be total on the model");
  if (k.hypotheses() != source.size()) throw Error(ErrorCode::WidthMismatch, "kernel/class size mismatch");
  for (std::size_t p : f) {
    if (p >= target.width()) throw Error(ErrorCode::InvalidArgument, "map leaves the target space");
  }
  std::vector<HypId> pre;
  pre.reserve(target.size());
  for (const auto& g : target.members()) pre.push_back(source.id_of(preimage(g, f, source.width())));

  std::vector<std::vector<XValue>> table(k.outcomes());
  for (std::size_t x = 0; x < k.outcomes(); ++x) {
    for (HypId id : pre) table[x].push_back(k(id, x));
  }
  Pushforward out{EKernel::classify(table, target), {}};
  if (pa.points() != source.width() || pa.outcomes() != k.outcomes()) {
    throw Error(ErrorCode::WidthMismatch, "probability assignment does not match the source model");
  }
  for (HypId g : target.nonempty_ids()) {
    const auto var = out.kernel.variable(g);
    for (std::size_t p = 0; p < source.width(); ++p) {
      if (!target.at(g).contains(f[p])) continue;
      ValidityEntry e{g, p, pa[p].expectation(var), false};
      e.ok = e.expectation <= XValue::one();
      out.validity.valid = out.validity.valid && e.ok;
      out.validity.entries.push_back(std::move(e));
    }
  }
  return out;
}

}  // namespace emeasure
