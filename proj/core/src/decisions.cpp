#include "emeasure/decisions.hpp"

#include <algorithm>
#include <unordered_set>

#include "emeasure/errors.hpp"

namespace emeasure {

namespace {

void require_capacity(const EKernel& k) {
  if (!k.at_least(EClass::Capacity)) throw Error(ErrorCode::NotACapacity, "consequence bounds need a capacity kernel");
}

XValue sup_bound_evidence(const EKernel& k, const HypothesisClass& cls, const ConsequenceTable& table,
                          std::size_t row, std::size_t x) {
  XValue sup;
  for (std::size_t d = 0; d < table.decisions.size(); ++d) {
    const PointSet h = hypothesis_for_bound(table, d, table.entries[d][row]);
    sup = std::max(sup, k(cls.id_of(h), x));
  }
  return sup;
}

// Benchmark rows with duplicates removed; the first point carrying a row
// stands for it.
std::vector<std::size_t> distinct_rows(const ConsequenceTable& table) {
  std::vector<std::size_t> rows;
  for (std::size_t q = 0; q < table.points(); ++q) {
    bool seen = false;
    for (std::size_t r : rows) {
      bool same = true;
      for (const auto& col : table.entries) same = same && col[r] == col[q];
      seen = seen || same;
    }
    if (!seen) rows.push_back(q);
  }
  return rows;
}

template <class StatFn>
ConsequenceReport bound_report(const EKernel& k, const ProbabilityAssignment& pa, const HypothesisSpace& space,
                               const ConsequenceTable& table, const XValue& limit, bool at_least, StatFn stat) {
  table.validate(space.width());
  require_order_measurable(table, space);
  require_capacity(k);
  const auto& cls = space.cls();
  ConsequenceReport r;
  r.kernel_valid = check_validity(k, pa, cls).valid;
  for (std::size_t row : distinct_rows(table)) {
    const PointSet h_row = row_hypothesis(table, row);
    const HypId h_id = cls.id_of(h_row);
    std::vector<XValue> s(k.outcomes());
    for (std::size_t x = 0; x < k.outcomes(); ++x) {
      s[x] = stat(row, x);
      ++r.pointwise_checked;
      if (sup_bound_evidence(k, cls, table, row, x) > k(h_id, x)) ++r.pointwise_violations;
    }
    for (std::size_t p : h_row.points()) {
      BoundEntry e{row, p, pa[p].expectation(s), false};
      e.ok = at_least ? e.statistic >= limit : e.statistic <= limit;
      r.holds = r.holds && e.ok;
      r.entries.push_back(std::move(e));
    }
  }
  return r;
}

}  // namespace

ConsequenceSpace::ConsequenceSpace(std::vector<std::string> labels,
                                   const std::vector<std::pair<std::size_t, std::size_t>>& pairs)
    : labels_(std::move(labels)) {
  geq_.assign(labels_.size(), std::vector<bool>(labels_.size(), false));
  for (std::size_t i = 0; i < labels_.size(); ++i) geq_[i][i] = true;
  for (const auto& [a, b] : pairs) {
    if (a >= labels_.size() || b >= labels_.size()) {
      throw Error(ErrorCode::InvalidArgument, "order pair refers to an unknown consequence");
    }
    geq_[a][b] = true;
  }
  validate();
}

ConsequenceSpace::ConsequenceSpace(std::vector<std::string> labels, std::vector<std::vector<bool>> geq)
    : labels_(std::move(labels)), geq_(std::move(geq)) {
  validate();
}

void ConsequenceSpace::validate() const {
  if (labels_.empty()) throw Error(ErrorCode::InvalidArgument, "consequence space without elements");
  std::unordered_set<std::string> seen;
  for (const auto& l : labels_) {
    if (!seen.insert(l).second) throw Error(ErrorCode::InvalidArgument, "duplicate consequence '" + l + "'");
  }
  const std::size_t n = labels_.size();
  if (geq_.size() != n) throw Error(ErrorCode::WidthMismatch, "order matrix has the wrong size");
  for (const auto& row : geq_) {
    if (row.size() != n) throw Error(ErrorCode::WidthMismatch, "order matrix has the wrong size");
  }
  for (std::size_t a = 0; a < n; ++a) {
    if (!geq_[a][a]) throw Error(ErrorCode::NotAPreorder, "consequence order is not reflexive at '" + labels_[a] + "'");
    for (std::size_t b = 0; b < n; ++b) {
      if (!geq_[a][b]) continue;
      for (std::size_t c = 0; c < n; ++c) {
        if (geq_[b][c] && !geq_[a][c]) {
          throw Error(ErrorCode::NotAPreorder, "consequence order is not transitive: " + labels_[a] + " >= " +
                                                   labels_[b] + " >= " + labels_[c]);
        }
      }
    }
  }
}

std::optional<std::size_t> ConsequenceSpace::find(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - labels_.begin());
}

void ConsequenceTable::validate(std::size_t model_size) const {
  if (decisions.empty()) throw Error(ErrorCode::InvalidArgument, "no decisions");
  if (entries.size() != decisions.size()) throw Error(ErrorCode::MissingEntry, "table rows do not match the decisions");
  for (std::size_t d = 0; d < entries.size(); ++d) {
    if (entries[d].size() != model_size) {
      throw Error(ErrorCode::MissingEntry, "decision '" + decisions[d] + "' lacks a consequence for some point");
    }
    for (std::size_t c : entries[d]) {
      if (c >= space.size()) throw Error(ErrorCode::InvalidArgument, "unknown consequence index");
    }
  }
}

void NumericLoss::validate(std::size_t model_size) const {
  if (decisions.empty()) throw Error(ErrorCode::InvalidArgument, "no decisions");
  if (entries.size() != decisions.size()) throw Error(ErrorCode::MissingEntry, "loss rows do not match the decisions");
  for (std::size_t d = 0; d < entries.size(); ++d) {
    if (entries[d].size() != model_size) {
      throw Error(ErrorCode::MissingEntry, "decision '" + decisions[d] + "' lacks a loss for some point");
    }
  }
}

ConsequenceTable NumericLoss::to_table() const {
  std::vector<XValue> values;
  for (const auto& row : entries) values.insert(values.end(), row.begin(), row.end());
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  std::vector<std::string> labels;
  std::vector<std::vector<bool>> geq(values.size(), std::vector<bool>(values.size()));
  for (std::size_t a = 0; a < values.size(); ++a) {
    labels.push_back(values[a].str());
    for (std::size_t b = 0; b < values.size(); ++b) geq[a][b] = values[a] >= values[b];
  }
  ConsequenceTable t{decisions, ConsequenceSpace(std::move(labels), std::move(geq)), {}};
  for (const auto& row : entries) {
    std::vector<std::size_t> idx;
    for (const auto& v : row) {
      idx.push_back(static_cast<std::size_t>(std::lower_bound(values.begin(), values.end(), v) - values.begin()));
    }
    t.entries.push_back(std::move(idx));
  }
  return t;
}

PointSet hypothesis_for_bound(const ConsequenceTable& table, std::size_t d, std::size_t c) {
  if (c >= table.space.size()) throw Error(ErrorCode::InvalidArgument, "unknown consequence index");
  const auto& row = table.entries.at(d);
  std::uint64_t bits = 0;
  for (std::size_t p = 0; p < row.size(); ++p) {
    if (table.space.geq(row[p], c)) bits |= std::uint64_t{1} << p;
  }
  return PointSet(row.size(), bits);
}

PointSet row_hypothesis(const ConsequenceTable& table, std::size_t q) {
  std::uint64_t bits = 0;
  for (std::size_t p = 0; p < table.points(); ++p) {
    bool above = true;
    for (const auto& col : table.entries) above = above && table.space.geq(col[p], col[q]);
    if (above) bits |= std::uint64_t{1} << p;
  }
  return PointSet(table.points(), bits);
}

ConsequenceClass build_consequence_class(const ConsequenceTable& table, const Model& model) {
  table.validate(model.size());
  std::vector<PointSet> rows;
  for (std::size_t p = 0; p < model.size(); ++p) rows.push_back(row_hypothesis(table, p));
  Preorder order = Preorder::from_rows(rows);
  ConsequenceClass cc{HypothesisSpace(model, class_from_preorder(order)), order, rows, {}};
  for (std::size_t d = 0; d < table.decisions.size(); ++d) {
    for (std::size_t c = 0; c < table.space.size(); ++c) {
      if (!cc.space.cls().contains(hypothesis_for_bound(table, d, c))) cc.missing.emplace_back(d, c);
    }
  }
  return cc;
}

void require_order_measurable(const ConsequenceTable& table, const HypothesisSpace& space) {
  for (std::size_t q = 0; q < table.points(); ++q) {
    const PointSet h = row_hypothesis(table, q);
    if (!space.cls().contains(h)) {
      throw Error(ErrorCode::OrderMeasurabilityViolation,
                  "hypothesis H_l for the consequence row of " + space.model().label(q) + ", " + space.describe(h) +
                      ", is not in the class");
    }
  }
}

ConsequenceReport check_econsequence_bound(const EKernel& k, const ProbabilityAssignment& pa,
                                           const HypothesisSpace& space, const ConsequenceTable& table) {
  return bound_report(k, pa, space, table, XValue::one(), false, [&](std::size_t row, std::size_t x) {
    return sup_bound_evidence(k, space.cls(), table, row, x);
  });
}

ConsequenceReport check_probability_bound(const EKernel& k, const ProbabilityAssignment& pa,
                                          const HypothesisSpace& space, const ConsequenceTable& table,
                                          const Rational& alpha) {
  if (alpha <= 0 || alpha > 1) throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1]");
  const XValue threshold = reciprocal(XValue(alpha));
  return bound_report(k, pa, space, table, XValue(Rational(1) - alpha), true, [&](std::size_t row, std::size_t x) {
    return sup_bound_evidence(k, space.cls(), table, row, x) < threshold ? XValue::one() : XValue::zero();
  });
}

ConsequenceAlphaRule canonical_consequence_rule(const EKernel& k, const HypothesisSpace& space,
                                                const ConsequenceTable& table) {
  return [&k, &space, &table](std::size_t row, std::size_t x) {
    return reciprocal(sup_bound_evidence(k, space.cls(), table, row, x));
  };
}

ConsequenceReport check_posthoc_consequence_bound(const EKernel& k, const ProbabilityAssignment& pa,
                                                  const HypothesisSpace& space, const ConsequenceTable& table,
                                                  const ConsequenceAlphaRule& rule) {
  return bound_report(k, pa, space, table, XValue::one(), false, [&](std::size_t row, std::size_t x) {
    const XValue level = rule(row, x);
    const XValue sup = sup_bound_evidence(k, space.cls(), table, row, x);
    return sup >= reciprocal(level) ? reciprocal(level) : XValue::zero();
  });
}

ConsequenceReport check_selected_decision_bound(const EKernel& k, const ProbabilityAssignment& pa,
                                                const HypothesisSpace& space, const ConsequenceTable& table,
                                                const std::vector<std::size_t>& decision_rule) {
  if (decision_rule.size() != k.outcomes()) throw Error(ErrorCode::WidthMismatch, "decision rule must cover every outcome");
  return bound_report(k, pa, space, table, XValue::one(), false, [&](std::size_t row, std::size_t x) {
    const std::size_t d = decision_rule[x];
    return k(space.cls().id_of(hypothesis_for_bound(table, d, table.entries.at(d)[row])), x);
  });
}

XValue integrated_loss(const NumericLoss& loss, const EFunction& e, const HypothesisClass& cls, std::size_t d) {
  return shilkret_integral(OrderMeasurableFn(loss.column(d), cls), e, cls);
}

IntegratedLoss e_integrated_loss(const NumericLoss& loss, const EFunction& e, const ConsequenceClass& cc,
                                 std::size_t d) {
  const auto& cls = cc.space.cls();
  loss.validate(cls.width());
  if (!e.at_least(EClass::Measure)) throw Error(ErrorCode::NotAMeasure, "the E-integrated loss needs an E-measure on H_L");
  if (e.size() != cls.size()) throw Error(ErrorCode::WidthMismatch, "evidence does not match H_L");
  const ConsequenceTable table = loss.to_table();
  IntegratedLoss out;
  out.generic = integrated_loss(loss, e, cls, d);
  for (std::size_t p = 0; p < cls.width(); ++p) {
    const XValue l = loss.entries[d][p];
    out.via_least = std::max(out.via_least, l / e[cls.id_of(row_hypothesis(table, p))]);
    out.via_bound = std::max(out.via_bound, l / e[cls.id_of(hypothesis_for_bound(table, d, table.entries[d][p]))]);
  }
  out.agree = out.generic == out.via_least && out.generic == out.via_bound;
  return out;
}

GrunwaldReport check_grunwald_bound(const EKernel& k, const ProbabilityAssignment& pa, const HypothesisSpace& space,
                                    const NumericLoss& loss) {
  const auto& cls = space.cls();
  loss.validate(cls.width());
  const ConsequenceTable table = loss.to_table();
  require_order_measurable(table, space);
  require_capacity(k);
  GrunwaldReport r;
  std::vector<std::vector<XValue>> integral(loss.decisions.size(), std::vector<XValue>(k.outcomes()));
  for (std::size_t d = 0; d < loss.decisions.size(); ++d) {
    for (std::size_t x = 0; x < k.outcomes(); ++x) integral[d][x] = integrated_loss(loss, k.column(x), cls, d);
  }
  for (std::size_t p = 0; p < cls.width(); ++p) {
    std::vector<XValue> stat(k.outcomes());
    std::vector<XValue> econs(k.outcomes());
    for (std::size_t x = 0; x < k.outcomes(); ++x) {
      for (std::size_t d = 0; d < loss.decisions.size(); ++d) {
        const XValue ratio = loss.entries[d][p] / integral[d][x];
        const XValue bound = k(cls.id_of(hypothesis_for_bound(table, d, table.entries[d][p])), x);
        ++r.pointwise_checked;
        if (ratio > bound) ++r.markov_violations;
        stat[x] = std::max(stat[x], ratio);
        econs[x] = std::max(econs[x], bound);
      }
      if (stat[x] > econs[x]) ++r.slack_violations;
    }
    r.statistic.push_back(pa[p].expectation(stat));
    r.econsequence.push_back(pa[p].expectation(econs));
    r.holds = r.holds && r.statistic.back() <= XValue::one();
  }
  return r;
}

Admissibility admissible_decisions(const EFunction& e, const HypothesisClass& cls, const ConsequenceTable& table) {
  table.validate(cls.width());
  if (e.size() != cls.size()) throw Error(ErrorCode::WidthMismatch, "evidence does not match the class");
  const std::size_t nd = table.decisions.size();
  const std::size_t nc = table.space.size();
  Admissibility a;
  std::vector<std::vector<std::optional<XValue>>> ev(nd, std::vector<std::optional<XValue>>(nc));
  for (std::size_t d = 0; d < nd; ++d) {
    for (std::size_t c = 0; c < nc; ++c) {
      if (auto id = cls.find(hypothesis_for_bound(table, d, c))) {
        ev[d][c] = e[*id];
      } else {
        a.not_measurable.emplace_back(d, c);
      }
    }
  }
  a.geq.assign(nd, std::vector<bool>(nd, true));
  for (std::size_t d = 0; d < nd; ++d) {
    for (std::size_t d2 = 0; d2 < nd; ++d2) {
      for (std::size_t c = 0; c < nc; ++c) {
        if (ev[d][c] && ev[d2][c] && *ev[d][c] < *ev[d2][c]) a.geq[d][d2] = false;
      }
    }
  }
  for (std::size_t d = 0; d < nd; ++d) {
    bool dominated = false;
    for (std::size_t d2 = 0; d2 < nd; ++d2) dominated = dominated || (a.geq[d2][d] && !a.geq[d][d2]);
    if (!dominated) a.admissible.push_back(d);
  }
  return a;
}

OptimalityClass optimality_class(const NumericLoss& loss) {
  const std::size_t n = loss.points();
  loss.validate(n);
  std::vector<std::uint64_t> bits(loss.decisions.size(), 0);
  for (std::size_t p = 0; p < n; ++p) {
    XValue best = XValue::infinity();
    for (const auto& row : loss.entries) best = std::min(best, row[p]);
    for (std::size_t d = 0; d < loss.decisions.size(); ++d) {
      if (loss.entries[d][p] == best) bits[d] |= std::uint64_t{1} << p;
    }
  }
  std::vector<PointSet> sets;
  for (auto b : bits) sets.emplace_back(n, b);
  return OptimalityClass{sets, HypothesisClass::union_closure(n, sets)};
}

std::vector<std::size_t> optimal_decision_map(const NumericLoss& loss) {
  const std::size_t n = loss.points();
  loss.validate(n);
  std::vector<std::size_t> f(n);
  for (std::size_t p = 0; p < n; ++p) {
    std::size_t arg = 0;
    std::size_t ties = 0;
    for (std::size_t d = 0; d < loss.decisions.size(); ++d) {
      if (loss.entries[d][p] < loss.entries[arg][p]) {
        arg = d;
        ties = 0;
      } else if (d != arg && loss.entries[d][p] == loss.entries[arg][p]) {
        ++ties;
      }
    }
    if (ties > 0) {
      throw Error(ErrorCode::InvalidArgument, "optimal decision for point " + std::to_string(p) + " is not unique");
    }
    f[p] = arg;
  }
  return f;
}

NumericLoss chi_square_loss(const ProbabilityAssignment& pa, const std::vector<std::string>& point_labels) {
  if (point_labels.size() != pa.points()) throw Error(ErrorCode::WidthMismatch, "one label per point required");
  NumericLoss loss{point_labels, {}};
  for (std::size_t q = 0; q < pa.points(); ++q) {
    std::vector<XValue> row;
    for (std::size_t p = 0; p < pa.points(); ++p) {
      XValue sum;
      for (std::size_t x = 0; x < pa.outcomes(); ++x) {
        const Rational diff = pa[p][x] - pa[q][x];
        sum += XValue(diff * diff) / XValue(pa[q][x]);
      }
      row.push_back(sum);
    }
    loss.entries.push_back(std::move(row));
  }
  return loss;
}

std::size_t min_evidence_point(const EKernel& k, const HypothesisClass& cls, std::size_t x) {
  std::size_t best = 0;
  for (std::size_t p = 1; p < cls.width(); ++p) {
    if (k(cls.id_of(PointSet::singleton(cls.width(), p)), x) < k(cls.id_of(PointSet::singleton(cls.width(), best)), x)) {
      best = p;
    }
  }
  return best;
}

}  // namespace emeasure
