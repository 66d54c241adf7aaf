#include "io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "emeasure/errors.hpp"

namespace emeasure::cli {

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

Error fail(ErrorCode code, const std::string& where, const std::string& msg) { return Error(code, where + ": " + msg); }

/// Re-raises library errors with the input location in front.
template <typename F>
auto in_context(const std::string& where, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw fail(e.code(), where, e.what());
  }
}

std::string scalar(const YAML::Node& node, const std::string& where) {
  if (!node || !node.IsScalar()) throw fail(ErrorCode::InvalidArgument, where, "expected a scalar");
  return node.Scalar();
}

const YAML::Node require(const YAML::Node& doc, const std::string& key, const Source& src) {
  if (!doc.IsMap()) throw fail(ErrorCode::InvalidArgument, src.at("<root>"), "expected a mapping");
  const YAML::Node n = doc[key];
  if (!n) throw fail(ErrorCode::MissingEntry, src.at(key), "field is required");
  return n;
}

std::vector<std::string> string_list(const YAML::Node& node, const std::string& where) {
  if (!node.IsSequence()) throw fail(ErrorCode::InvalidArgument, where, "expected a list");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < node.size(); ++i) out.push_back(scalar(node[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

std::size_t lookup(const std::vector<std::string>& labels, const std::string& label, const std::string& where,
                   const std::string& kind) {
  auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) throw fail(ErrorCode::InvalidArgument, where, "unknown " + kind + " '" + label + "'");
  return static_cast<std::size_t>(it - labels.begin());
}

/// Point given as a label or a 0-based index.
std::size_t point_ref(const YAML::Node& node, const Model& model, const std::string& where) {
  const std::string s = scalar(node, where);
  if (auto p = model.find(s)) return *p;
  if (!s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); })) {
    const std::size_t i = std::stoul(s);
    if (i < model.size()) return i;
  }
  throw fail(ErrorCode::InvalidArgument, where, "unknown point '" + s + "'");
}

/// table[x][H] from {hypothesis: {outcome: value}}.
std::vector<std::vector<XValue>> kernel_table(const YAML::Node& node, const HypothesisSpace& space,
                                              const SampleSpace& outcomes, const Source& src,
                                              const std::string& field) {
  const auto& cls = space.cls();
  if (!node.IsMap()) throw fail(ErrorCode::InvalidArgument, src.at(field), "expected {hypothesis: {outcome: value}}");
  std::vector<std::vector<std::optional<XValue>>> cells(outcomes.size(), std::vector<std::optional<XValue>>(cls.size()));
  for (auto& col : cells) col[0] = XValue::infinity();
  std::set<std::size_t> seen;
  for (const auto& kv : node) {
    const std::string key = scalar(kv.first, src.at(field));
    const std::string hf = field + "." + key;
    const PointSet h = parse_hypothesis(key, space.model(), src, hf);
    auto id = cls.find(h);
    if (!id) throw fail(ErrorCode::InvalidArgument, src.at(hf), space.describe(h) + " is not a member of the class");
    if (!seen.insert(index(*id)).second) throw fail(ErrorCode::InvalidArgument, src.at(hf), "duplicate hypothesis");
    if (!kv.second.IsMap()) throw fail(ErrorCode::InvalidArgument, src.at(hf), "expected {outcome: value}");
    for (const auto& ov : kv.second) {
      const std::string o = scalar(ov.first, src.at(hf));
      auto x = outcomes.find(o);
      if (!x) throw fail(ErrorCode::InvalidArgument, src.at(hf), "unknown outcome '" + o + "'");
      cells[*x][index(*id)] = parse_value(ov.second, src, hf + "." + o);
    }
  }
  std::vector<std::vector<XValue>> table(outcomes.size(), std::vector<XValue>(cls.size()));
  for (std::size_t x = 0; x < outcomes.size(); ++x) {
    for (std::size_t i = 0; i < cls.size(); ++i) {
      if (!cells[x][i]) {
        throw fail(ErrorCode::MissingEntry, src.at(field),
                   "no value for " + space.describe(hyp_id(i)) + " at outcome '" + outcomes.label(x) + "'");
      }
      table[x][i] = *cells[x][i];
    }
  }
  return table;
}

}  // namespace

std::string Source::at(const std::string& field) const {
  return what + " '" + path + "', field '" + field + "'";
}

YAML::Node load_yaml(const std::string& path, const std::string& what) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open " + what + " '" + path + "'");
  try {
    return YAML::Load(in);
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::InvalidArgument, what + " '" + path + "', line " + std::to_string(e.mark.line + 1) +
                                                ", column " + std::to_string(e.mark.column + 1) + ": " + e.msg);
  }
}

Caps parse_caps(const std::string& text, Caps base) {
  const std::map<std::string, std::size_t Caps::*> keys{
      {"points", &Caps::max_points},         {"members", &Caps::max_bruteforce_members},
      {"powerset", &Caps::max_powerset_points}, {"depth", &Caps::max_tree_depth},
      {"branching", &Caps::max_tree_branching}, {"stopping", &Caps::max_stopping_times},
      {"family", &Caps::max_family_size}};
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::InvalidArgument, "caps entry '" + item + "' is not key=value");
    const std::string key = trim(item.substr(0, eq));
    const std::string val = trim(item.substr(eq + 1));
    auto it = keys.find(key);
    if (it == keys.end()) throw Error(ErrorCode::InvalidArgument, "unknown cap '" + key + "'");
    if (val.empty() || !std::all_of(val.begin(), val.end(), [](unsigned char c) { return std::isdigit(c); }) ||
        std::stoull(val) == 0) {
      throw Error(ErrorCode::InvalidArgument, "cap '" + key + "' must be a positive integer");
    }
    base.*(it->second) = std::stoull(val);
  }
  return base;
}

XValue parse_value(const YAML::Node& node, const Source& src, const std::string& field) {
  std::string s = scalar(node, src.at(field));
  if (s == ".inf" || s == ".Inf" || s == ".INF") s = "inf";
  return in_context(src.at(field), [&] { return XValue::parse(s); });
}

Rational parse_mass(const YAML::Node& node, const Source& src, const std::string& field) {
  const std::string s = scalar(node, src.at(field));
  return in_context(src.at(field), [&] { return parse_rational(s); });
}

PointSet parse_hypothesis(const std::string& label, const Model& model, const Source& src, const std::string& field) {
  std::string body = trim(label);
  if (!body.empty() && body.front() == '{') {
    if (body.back() != '}') throw fail(ErrorCode::InvalidArgument, src.at(field), "unbalanced braces in '" + label + "'");
    body = body.substr(1, body.size() - 2);
  }
  PointSet out = PointSet::empty(model.size());
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    auto p = model.find(item);
    if (!p) throw fail(ErrorCode::InvalidArgument, src.at(field), "unknown point '" + item + "'");
    out = out | PointSet::singleton(model.size(), *p);
  }
  return out;
}

HypothesisSpace parse_space(const YAML::Node& doc, const Source& src, const Caps& caps) {
  const auto labels = string_list(require(doc, "points", src), src.at("points"));
  Model model = in_context(src.at("points"), [&] { return Model(labels, caps.max_points); });
  const std::size_t n = model.size();
  const bool has_gen = static_cast<bool>(doc["generators"]);
  const bool has_pre = static_cast<bool>(doc["preorder"]);
  if (has_gen == has_pre) {
    throw fail(ErrorCode::InvalidArgument, src.at("generators"), "give exactly one of 'generators' and 'preorder'");
  }
  if (has_gen) {
    const YAML::Node gens = doc["generators"];
    if (!gens.IsSequence()) throw fail(ErrorCode::InvalidArgument, src.at("generators"), "expected a list of lists");
    std::vector<PointSet> sets;
    for (std::size_t i = 0; i < gens.size(); ++i) {
      const std::string f = "generators[" + std::to_string(i) + "]";
      PointSet s = PointSet::empty(n);
      for (const auto& l : string_list(gens[i], src.at(f))) {
        s = s | PointSet::singleton(n, lookup(model.labels(), l, src.at(f), "point"));
      }
      sets.push_back(s);
    }
    return HypothesisSpace(std::move(model), HypothesisClass::union_closure(n, sets));
  }
  const YAML::Node pairs = doc["preorder"];
  if (!pairs.IsSequence()) throw fail(ErrorCode::InvalidArgument, src.at("preorder"), "expected a list of pairs");
  Preorder pre = Preorder::identity(n);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const std::string f = src.at("preorder[" + std::to_string(i) + "]");
    if (!pairs[i].IsSequence() || pairs[i].size() != 2) throw fail(ErrorCode::InvalidArgument, f, "expected [i, j]");
    pre.set(point_ref(pairs[i][0], model, f), point_ref(pairs[i][1], model, f));
  }
  in_context(src.at("preorder"), [&] { pre.validate(); });
  return HypothesisSpace(std::move(model), class_from_preorder(pre));
}

EFunction parse_evidence_map(const YAML::Node& node, const HypothesisSpace& space, const Source& src,
                             const std::string& field) {
  const auto& cls = space.cls();
  if (!node.IsMap()) throw fail(ErrorCode::InvalidArgument, src.at(field), "expected {hypothesis: value}");
  std::vector<std::optional<XValue>> vals(cls.size());
  vals[0] = XValue::infinity();
  std::set<std::size_t> seen;
  for (const auto& kv : node) {
    const std::string key = scalar(kv.first, src.at(field));
    const std::string hf = field + "." + key;
    const PointSet h = parse_hypothesis(key, space.model(), src, hf);
    auto id = cls.find(h);
    if (!id) throw fail(ErrorCode::InvalidArgument, src.at(hf), space.describe(h) + " is not a member of the class");
    if (!seen.insert(index(*id)).second) throw fail(ErrorCode::InvalidArgument, src.at(hf), "duplicate hypothesis");
    vals[index(*id)] = parse_value(kv.second, src, hf);
  }
  std::vector<XValue> out;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (!vals[i]) throw fail(ErrorCode::MissingEntry, src.at(field), "no value for " + space.describe(hyp_id(i)));
    out.push_back(*vals[i]);
  }
  return in_context(src.at(field), [&] { return classify(std::move(out), cls); });
}

ModelFile parse_model(const YAML::Node& doc, const Source& src, const std::vector<std::string>* order) {
  const YAML::Node pmf = require(doc, "pmf", src);
  if (!pmf.IsMap() || pmf.size() == 0) throw fail(ErrorCode::InvalidArgument, src.at("pmf"), "expected {label: {outcome: mass}}");
  std::vector<std::string> outcome_labels;
  if (doc["outcomes"]) {
    outcome_labels = string_list(doc["outcomes"], src.at("outcomes"));
  } else {
    const YAML::Node first = pmf.begin()->second;
    if (!first.IsMap()) throw fail(ErrorCode::InvalidArgument, src.at("pmf"), "expected {outcome: mass}");
    for (const auto& ov : first) outcome_labels.push_back(scalar(ov.first, src.at("pmf")));
  }
  SampleSpace outcomes = in_context(src.at("outcomes"), [&] { return SampleSpace(outcome_labels); });

  std::vector<std::string> labels;
  std::map<std::string, Pmf> by_label;
  for (const auto& kv : pmf) {
    const std::string label = scalar(kv.first, src.at("pmf"));
    const std::string f = "pmf." + label;
    if (!kv.second.IsMap()) throw fail(ErrorCode::InvalidArgument, src.at(f), "expected {outcome: mass}");
    std::vector<Rational> mass(outcomes.size(), Rational(0));
    for (const auto& ov : kv.second) {
      const std::string o = scalar(ov.first, src.at(f));
      auto x = outcomes.find(o);
      if (!x) throw fail(ErrorCode::InvalidArgument, src.at(f), "unknown outcome '" + o + "'");
      mass[*x] = parse_mass(ov.second, src, f + "." + o);
    }
    if (by_label.count(label)) throw fail(ErrorCode::InvalidArgument, src.at(f), "duplicate distribution");
    by_label.emplace(label, in_context(src.at(f), [&] { return Pmf(std::move(mass)); }));
    labels.push_back(label);
  }
  if (order) {
    for (const auto& l : *order) {
      if (!by_label.count(l)) throw fail(ErrorCode::MissingEntry, src.at("pmf"), "no distribution for point '" + l + "'");
    }
    if (order->size() != labels.size()) {
      for (const auto& l : labels) lookup(*order, l, src.at("pmf"), "point");
    }
    labels = *order;
  }
  std::vector<Pmf> pmfs;
  for (const auto& l : labels) pmfs.push_back(by_label.at(l));
  return ModelFile{std::move(outcomes), std::move(labels), ProbabilityAssignment(std::move(pmfs))};
}

EKernel parse_kernel(const YAML::Node& doc, const HypothesisSpace& space, const SampleSpace& outcomes,
                     const ProbabilityAssignment* pa, const Source& src) {
  if (!doc.IsMap()) throw fail(ErrorCode::InvalidArgument, src.at("<root>"), "expected a mapping");
  if (doc["likelihood"]) {
    if (!pa) throw fail(ErrorCode::InvalidArgument, src.at("likelihood"), "a likelihood kernel needs --model");
    const YAML::Node lam = doc["likelihood"];
    if (!lam.IsMap()) throw fail(ErrorCode::InvalidArgument, src.at("likelihood"), "expected {outcome: mass}");
    std::vector<Rational> mass(outcomes.size(), Rational(0));
    for (const auto& ov : lam) {
      const std::string o = scalar(ov.first, src.at("likelihood"));
      auto x = outcomes.find(o);
      if (!x) throw fail(ErrorCode::InvalidArgument, src.at("likelihood"), "unknown outcome '" + o + "'");
      mass[*x] = parse_mass(ov.second, src, "likelihood." + o);
    }
    return in_context(src.at("likelihood"), [&] { return likelihood_kernel(space.cls(), *pa, Pmf(std::move(mass))); });
  }
  const auto table = kernel_table(require(doc, "kernel", src), space, outcomes, src, "kernel");
  return in_context(src.at("kernel"), [&] { return EKernel::classify(table, space.cls()); });
}

EProcess parse_process(const YAML::Node& doc, const HypothesisSpace& space, const SampleSpace& outcomes,
                       const Source& src) {
  const YAML::Node proc = require(doc, "process", src);
  const YAML::Node parents_node = proc["parents"];
  if (!parents_node || !parents_node.IsSequence()) {
    throw fail(ErrorCode::MissingEntry, src.at("process.parents"), "expected a list of parent indices");
  }
  std::vector<long long> parents;
  for (std::size_t i = 0; i < parents_node.size(); ++i) {
    const std::string f = src.at("process.parents[" + std::to_string(i) + "]");
    try {
      parents.push_back(std::stoll(scalar(parents_node[i], f)));
    } catch (const std::logic_error&) {
      throw fail(ErrorCode::InvalidArgument, f, "expected an integer");
    }
  }
  FiltrationTree tree = in_context(src.at("process.parents"), [&] { return FiltrationTree::from_parents(parents); });
  if (tree.outcomes() != outcomes.size()) {
    throw fail(ErrorCode::WidthMismatch, src.at("process.parents"),
               "tree has " + std::to_string(tree.outcomes()) + " leaves but the model has " +
                   std::to_string(outcomes.size()) + " outcomes");
  }
  const YAML::Node steps_node = proc["steps"];
  if (!steps_node || !steps_node.IsSequence()) {
    throw fail(ErrorCode::MissingEntry, src.at("process.steps"), "expected one kernel table per time step");
  }
  std::vector<EKernel> steps;
  for (std::size_t t = 0; t < steps_node.size(); ++t) {
    const std::string f = "process.steps[" + std::to_string(t) + "]";
    const auto table = kernel_table(steps_node[t], space, outcomes, src, f);
    steps.push_back(in_context(src.at(f), [&] { return EKernel::classify(table, space.cls()); }));
  }
  return in_context(src.at("process"), [&] { return EProcess(std::move(tree), std::move(steps)); });
}

ConsequenceTable DecisionFile::table() const {
  if (const auto* loss = std::get_if<NumericLoss>(&problem)) return loss->to_table();
  return std::get<ConsequenceTable>(problem);
}

DecisionFile parse_decisions(const YAML::Node& doc, const Source& src, const std::vector<std::string>& points,
                             const ProbabilityAssignment* pa) {
  if (!doc.IsMap()) throw fail(ErrorCode::InvalidArgument, src.at("<root>"), "expected a mapping");
  const YAML::Node loss_node = doc["loss"];
  if (loss_node && loss_node.IsScalar()) {
    if (loss_node.Scalar() != "chi-square") {
      throw fail(ErrorCode::InvalidArgument, src.at("loss"), "the only named loss is 'chi-square'");
    }
    if (!pa) throw fail(ErrorCode::InvalidArgument, src.at("loss"), "the chi-square loss needs --model");
    return DecisionFile{points, chi_square_loss(*pa, points)};
  }
  const auto decisions = string_list(require(doc, "decisions", src), src.at("decisions"));
  auto per_point = [&](const YAML::Node& node, const std::string& field, auto&& cell) {
    if (!node.IsMap()) throw fail(ErrorCode::InvalidArgument, src.at(field), "expected {point: {decision: ..}}");
    std::set<std::string> seen;
    for (const auto& kv : node) {
      const std::string pl = scalar(kv.first, src.at(field));
      const std::string f = field + "." + pl;
      const std::size_t p = lookup(points, pl, src.at(f), "point");
      if (!seen.insert(pl).second) throw fail(ErrorCode::InvalidArgument, src.at(f), "duplicate point");
      if (!kv.second.IsMap()) throw fail(ErrorCode::InvalidArgument, src.at(f), "expected {decision: ..}");
      for (const auto& dv : kv.second) {
        const std::string dl = scalar(dv.first, src.at(f));
        cell(p, lookup(decisions, dl, src.at(f), "decision"), dv.second, f + "." + dl);
      }
    }
  };
  if (loss_node) {
    std::vector<std::vector<std::optional<XValue>>> cells(decisions.size(), std::vector<std::optional<XValue>>(points.size()));
    per_point(loss_node, "loss", [&](std::size_t p, std::size_t d, const YAML::Node& v, const std::string& f) {
      cells[d][p] = parse_value(v, src, f);
    });
    NumericLoss loss{decisions, {}};
    for (std::size_t d = 0; d < decisions.size(); ++d) {
      std::vector<XValue> row;
      for (std::size_t p = 0; p < points.size(); ++p) {
        if (!cells[d][p]) {
          throw fail(ErrorCode::MissingEntry, src.at("loss"),
                     "no loss for decision '" + decisions[d] + "' at point '" + points[p] + "'");
        }
        row.push_back(*cells[d][p]);
      }
      loss.entries.push_back(std::move(row));
    }
    return DecisionFile{points, std::move(loss)};
  }
  const YAML::Node cons = require(doc, "consequences", src);
  const auto elements = string_list(require(cons, "elements", src), src.at("consequences.elements"));
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (const YAML::Node op = cons["order-pairs"]) {
    if (!op.IsSequence()) throw fail(ErrorCode::InvalidArgument, src.at("consequences.order-pairs"), "expected a list of pairs");
    for (std::size_t i = 0; i < op.size(); ++i) {
      const std::string f = src.at("consequences.order-pairs[" + std::to_string(i) + "]");
      if (!op[i].IsSequence() || op[i].size() != 2) throw fail(ErrorCode::InvalidArgument, f, "expected [a, b] meaning a >= b");
      pairs.emplace_back(lookup(elements, scalar(op[i][0], f), f, "consequence"),
                         lookup(elements, scalar(op[i][1], f), f, "consequence"));
    }
  }
  ConsequenceSpace space = in_context(src.at("consequences"), [&] { return ConsequenceSpace(elements, pairs); });
  std::vector<std::vector<std::optional<std::size_t>>> cells(decisions.size(),
                                                             std::vector<std::optional<std::size_t>>(points.size()));
  per_point(require(doc, "table", src), "table", [&](std::size_t p, std::size_t d, const YAML::Node& v, const std::string& f) {
    cells[d][p] = lookup(elements, scalar(v, src.at(f)), src.at(f), "consequence");
  });
  ConsequenceTable table{decisions, std::move(space), {}};
  for (std::size_t d = 0; d < decisions.size(); ++d) {
    std::vector<std::size_t> row;
    for (std::size_t p = 0; p < points.size(); ++p) {
      if (!cells[d][p]) {
        throw fail(ErrorCode::MissingEntry, src.at("table"),
                   "no consequence for decision '" + decisions[d] + "' at point '" + points[p] + "'");
      }
      row.push_back(*cells[d][p]);
    }
    table.entries.push_back(std::move(row));
  }
  return DecisionFile{points, std::move(table)};
}

}  // namespace emeasure::cli
