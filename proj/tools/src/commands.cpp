#include "commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "emeasure/decisions.hpp"
#include "emeasure/errors.hpp"
#include "emeasure/multiplicity.hpp"
#include "emeasure/process.hpp"
#include "emeasure/table1.hpp"
#include "io.hpp"

namespace emeasure::cli {

namespace {

using Json = nlohmann::ordered_json;

struct RunConfig {
  std::string subcommand;
  std::string space, kernel, model, loss, evidence;
  std::string alpha = "1/20";
  std::string check = "validity";
  std::string procedure = "ebh";
  std::string bound = "econsequence";
  std::string golden;
  std::string family;
  std::string cells;
  std::string format = "text";
  std::optional<std::size_t> cap_members;
  Caps caps;

  bool records() const { return format == "records"; }
};

void emit(std::ostream& out, const Json& j) { out << j.dump() << '\n'; }

std::string yes(bool b) { return b ? "yes" : "no"; }

Rational parse_alpha(const std::string& text) {
  Rational a = parse_rational(text);
  if (a <= 0 || a > 1) throw Error(ErrorCode::InvalidArgument, "--alpha must lie in (0, 1], got " + text);
  return a;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    out.push_back(item.substr(b, item.find_last_not_of(" \t") - b + 1));
  }
  return out;
}

HypothesisSpace load_space(const RunConfig& cfg) {
  if (cfg.space.empty()) throw Error(ErrorCode::InvalidArgument, cfg.subcommand + " needs --space");
  return parse_space(load_yaml(cfg.space, "space file"), Source{"space file", cfg.space}, cfg.caps);
}

ModelFile load_model(const RunConfig& cfg, const std::vector<std::string>* order) {
  if (cfg.model.empty()) throw Error(ErrorCode::InvalidArgument, cfg.subcommand + " needs --model");
  return parse_model(load_yaml(cfg.model, "model file"), Source{"model file", cfg.model}, order);
}

/// Human names for hypotheses; falls back to the set notation.
struct Names {
  const HypothesisSpace* space = nullptr;
  std::map<std::size_t, std::string> given;
  std::string operator()(HypId h) const {
    auto it = given.find(index(h));
    return it != given.end() ? it->second : space->describe(h);
  }
};

// ---- space ----------------------------------------------------------------

int cmd_space(const RunConfig& cfg, std::ostream& out) {
  const HypothesisSpace space = load_space(cfg);
  const auto& cls = space.cls();
  const auto& model = space.model();
  const auto& rep = space.report();
  if (cfg.records()) {
    emit(out, Json{{"type", "space"},
                   {"points", model.labels()},
                   {"members", cls.size()},
                   {"union_closed", rep.union_closed},
                   {"intersection_closed", rep.intersection_closed},
                   {"contains_full_model", rep.contains_full_model}});
    for (auto h : cls.ids()) emit(out, Json{{"type", "member"}, {"id", index(h)}, {"set", space.describe(h)}});
    if (space.intersection_closed()) {
      const Preorder pre = preorder_from_class(space);
      for (std::size_t p = 0; p < model.size(); ++p) {
        std::vector<std::string> upper;
        for (std::size_t q : pre.upper_set(p).points()) upper.push_back(model.label(q));
        emit(out, Json{{"type", "least"}, {"point", model.label(p)}, {"hypothesis", space.describe(space.least(p))},
                       {"upper", upper}});
      }
    }
    return kPass;
  }
  out << "points: " << model.size() << "\n";
  out << "members: " << cls.size() << "\n";
  out << "union-closed: " << yes(rep.union_closed) << "\n";
  out << "intersection-closed: " << yes(rep.intersection_closed) << "\n";
  out << "contains full model: " << yes(rep.contains_full_model) << "\n";
  out << "\nmembers:\n";
  for (auto h : cls.ids()) out << "  " << std::setw(4) << index(h) << "  " << space.describe(h) << "\n";
  if (!space.intersection_closed()) {
    out << "\nleast hypotheses: none (the class is not intersection-closed)\n";
    return kPass;
  }
  out << "\nleast hypotheses:\n";
  std::size_t width = 0;
  for (const auto& l : model.labels()) width = std::max(width, l.size());
  for (std::size_t p = 0; p < model.size(); ++p) {
    out << "  " << std::left << std::setw(static_cast<int>(width)) << model.label(p) << std::right << "  "
        << space.describe(space.least(p)) << "\n";
  }
  const Preorder pre = preorder_from_class(space);
  out << "\npreorder (row P marks every P' with P' >= P):\n  " << std::string(width, ' ');
  for (const auto& l : model.labels()) out << " " << std::setw(static_cast<int>(width)) << l;
  out << "\n";
  for (std::size_t p = 0; p < model.size(); ++p) {
    out << "  " << std::left << std::setw(static_cast<int>(width)) << model.label(p) << std::right;
    for (std::size_t q = 0; q < model.size(); ++q) {
      out << " " << std::setw(static_cast<int>(width)) << (pre.related(p, q) ? "1" : ".");
    }
    out << "\n";
  }
  return kPass;
}

// ---- closure --------------------------------------------------------------

int cmd_closure(const RunConfig& cfg, std::ostream& out) {
  const HypothesisSpace space = load_space(cfg);
  if (cfg.evidence.empty()) throw Error(ErrorCode::InvalidArgument, "closure needs --evidence");
  const Source src{"evidence file", cfg.evidence};
  const YAML::Node doc = load_yaml(cfg.evidence, src.what);
  if (!doc.IsMap() || !doc["evidence"]) throw Error(ErrorCode::MissingEntry, src.at("evidence") + ": field is required");
  const EFunction e = parse_evidence_map(doc["evidence"], space, src, "evidence");
  const bool fast = e.at_least(EClass::Capacity) && space.intersection_closed();
  EFunction closed;
  if (fast) {
    closed = closure_fast(e, space);
  } else {
    try {
      closed = closure_bruteforce(e, space.cls(), cfg.caps.max_bruteforce_members);
    } catch (const Error& err) {
      if (err.code() != ErrorCode::CapExceeded) throw;
      throw Error(ErrorCode::CapExceeded,
                  std::string(err.what()) + "; raise --cap-members (or members= in EMEASURE_CAPS), or supply a "
                                            "capacity on an intersection-closed space to use the fast path");
    }
  }
  std::size_t changed = 0;
  for (auto h : space.cls().ids()) changed += e[h] != closed[h];
  const std::string method = fast ? "fast" : "brute-force";
  if (cfg.records()) {
    emit(out, Json{{"type", "closure"}, {"method", method}, {"input_class", to_string(e.class_of())},
                   {"changed", changed}});
    for (auto h : space.cls().ids()) {
      emit(out, Json{{"type", "entry"}, {"hypothesis", space.describe(h)}, {"before", e[h].str()},
                     {"after", closed[h].str()}, {"changed", e[h] != closed[h]}});
    }
    return kPass;
  }
  out << "input: " << to_string(e.class_of()) << "\n";
  out << "method: " << method << "\n\n";
  std::size_t width = 10;
  for (auto h : space.cls().ids()) width = std::max(width, space.describe(h).size());
  for (auto h : space.cls().ids()) {
    out << "  " << std::left << std::setw(static_cast<int>(width)) << space.describe(h) << std::right << "  "
        << std::setw(8) << e[h].pretty() << " -> " << std::setw(8) << closed[h].pretty()
        << (e[h] != closed[h] ? "   changed" : "") << "\n";
  }
  out << "\n";
  if (changed == 0) {
    out << "no change\n";
  } else {
    out << changed << (changed == 1 ? " entry" : " entries") << " changed\n";
  }
  return kPass;
}

// ---- check ----------------------------------------------------------------

void validity_lines(const RunConfig& cfg, std::ostream& out, const HypothesisSpace& space,
                    const std::vector<ValidityEntry>& entries, const std::string& statistic) {
  for (const auto& v : entries) {
    if (cfg.records()) {
      emit(out, Json{{"type", "statistic"}, {"kind", statistic}, {"hypothesis", space.describe(v.hypothesis)},
                     {"point", space.model().label(v.point)}, {"value", v.expectation.str()}, {"ok", v.ok}});
    } else {
      out << "  " << space.describe(v.hypothesis) << " under " << space.model().label(v.point) << ": "
          << v.expectation.pretty() << (v.ok ? "" : "   VIOLATION") << "\n";
    }
  }
}

int verdict(const RunConfig& cfg, std::ostream& out, const std::string& check, bool pass, const std::string& witness) {
  if (cfg.records()) {
    Json j{{"type", "verdict"}, {"check", check}, {"pass", pass}};
    if (!pass && !witness.empty()) j["witness"] = witness;
    emit(out, j);
  } else {
    out << "\n" << check << ": " << (pass ? "pass" : "FAIL");
    if (!pass && !witness.empty()) out << " (" << witness << ")";
    out << "\n";
  }
  return pass ? kPass : kViolation;
}

std::string describe_entry(const HypothesisSpace& space, const ValidityEntry& v, const std::string& what) {
  return space.describe(v.hypothesis) + " under " + space.model().label(v.point) + ": " + what + " = " + v.expectation.str();
}

int cmd_check(const RunConfig& cfg, std::ostream& out) {
  const HypothesisSpace space = load_space(cfg);
  if (cfg.kernel.empty()) throw Error(ErrorCode::InvalidArgument, "check needs --kernel");
  const Source ksrc{"kernel file", cfg.kernel};
  const YAML::Node kdoc = load_yaml(cfg.kernel, ksrc.what);
  const auto& cls = space.cls();

  if (cfg.check == "predictive") {
    const ModelFile m = load_model(cfg, nullptr);
    if (m.outcomes.labels() != space.model().labels()) {
      throw Error(ErrorCode::WidthMismatch, "predictive checks need a space whose points are the model's outcomes");
    }
    const EKernel k = parse_kernel(kdoc, space, m.outcomes, nullptr, ksrc);
    const PredictiveReport r = check_predictive_validity(k, m.pa, space);
    for (std::size_t x = 0; x < k.outcomes(); ++x) {
      if (cfg.records()) {
        emit(out, Json{{"type", "predictive"}, {"outcome", m.outcomes.label(x)}, {"sup_true", r.sup_true[x].str()},
                       {"least_true", r.least_true[x].str()}});
      } else {
        out << "  " << m.outcomes.label(x) << ": sup over true " << r.sup_true[x].pretty() << ", least true "
            << r.least_true[x].pretty() << "\n";
      }
    }
    for (std::size_t q = 0; q < m.pa.points(); ++q) {
      if (cfg.records()) {
        emit(out, Json{{"type", "statistic"}, {"kind", "predictive"}, {"distribution", m.labels[q]},
                       {"value", r.sup_expectation[q].str()}, {"ok", r.sup_expectation[q] <= XValue::one()}});
      } else {
        out << "  under " << m.labels[q] << ": " << r.sup_expectation[q].pretty() << "\n";
      }
    }
    std::string witness;
    if (!r.sup_identity) witness = "supremum identity failed";
    return verdict(cfg, out, "predictive", r.valid && r.least_valid && r.sup_identity, witness);
  }

  const ModelFile m = load_model(cfg, &space.model().labels());
  if (cfg.check == "anytime") {
    const EProcess proc = parse_process(kdoc, space, m.outcomes, ksrc);
    const AnytimeReport r = check_anytime_validity(proc, m.pa, cls, cfg.caps);
    std::string witness;
    if (r.witness) {
      witness = describe_entry(space, r.witness->entry, "stopped expectation") + " at tau = [";
      for (std::size_t x = 0; x < r.witness->tau.size(); ++x) witness += (x ? "," : "") + std::to_string(r.witness->tau[x]);
      witness += "]";
    }
    if (cfg.records()) {
      emit(out, Json{{"type", "anytime"}, {"stopping_times", r.stopping_times_checked}, {"horizon", proc.horizon()}});
    } else {
      out << "stopping times checked: " << r.stopping_times_checked << "\n";
    }
    return verdict(cfg, out, "anytime", r.anytime_valid, witness);
  }

  const EKernel k = parse_kernel(kdoc, space, m.outcomes, &m.pa, ksrc);
  if (cfg.check == "validity") {
    const ValidityReport r = check_validity(k, m.pa, cls);
    validity_lines(cfg, out, space, r.entries, "expectation");
    const auto first = r.first_violation();
    return verdict(cfg, out, "validity", r.valid, first ? describe_entry(space, *first, "expectation") : "");
  }
  if (cfg.check == "posthoc") {
    const Rational alpha = parse_alpha(cfg.alpha);
    const PosthocReport r = check_posthoc_validity(k, m.pa, cls, canonical_rule(k));
    validity_lines(cfg, out, space, r.entries, "posthoc");
    std::vector<Rational> grid{alpha, Rational(1, 100), Rational(1, 20), Rational(1, 10), Rational(1, 2), Rational(1)};
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    const auto w = search_posthoc_violation(k, m.pa, cls, grid);
    std::string witness;
    if (w) {
      witness = space.describe(w->hypothesis) + " under " + space.model().label(w->point) + ": statistic " +
                w->statistic.str() + " with levels [";
      for (std::size_t x = 0; x < w->levels.size(); ++x) witness += (x ? "," : "") + w->levels[x].str();
      witness += "]";
    }
    return verdict(cfg, out, "posthoc", r.holds && !w, witness);
  }
  if (cfg.check == "fwe") {
    const FweReport r = check_fwe(k, m.pa, space);
    for (std::size_t p = 0; p < r.statistic.size(); ++p) {
      if (cfg.records()) {
        emit(out, Json{{"type", "statistic"}, {"kind", "familywise"}, {"point", space.model().label(p)},
                       {"value", r.statistic[p].str()}, {"ok", r.statistic[p] <= XValue::one()}});
      } else {
        out << "  " << space.model().label(p) << ": " << r.statistic[p].pretty() << "\n";
      }
    }
    std::string witness;
    if (r.witness) witness = "familywise expectation under " + space.model().label(*r.witness) + " = " +
                             r.statistic[*r.witness].str();
    return verdict(cfg, out, "fwe", r.controlled, witness);
  }
  if (cfg.check == "fer") {
    const UniformFerReport r = check_fer_uniform(k, m.pa, space);
    for (std::size_t p = 0; p < r.sup_fer.size(); ++p) {
      if (cfg.records()) {
        emit(out, Json{{"type", "statistic"}, {"kind", "sup_fer"}, {"point", space.model().label(p)},
                       {"value", r.sup_fer[p].str()}, {"ok", r.sup_fer[p] <= XValue::one()}});
      } else {
        out << "  " << space.model().label(p) << ": sup over selection rules " << r.sup_fer[p].pretty() << "\n";
      }
    }
    std::string witness;
    for (std::size_t p = 0; p < r.sup_fer.size() && witness.empty(); ++p) {
      if (r.sup_fer[p] > XValue::one()) witness = "FER under " + space.model().label(p) + " = " + r.sup_fer[p].str();
    }
    return verdict(cfg, out, "fer", r.uniform_controls, witness);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown check '" + cfg.check + "'");
}

// ---- mtp ------------------------------------------------------------------

std::vector<XValue> toy_cells(const RunConfig& cfg) {
  if (cfg.cells.empty()) return default_cell_values();
  std::vector<XValue> v;
  for (const auto& s : split(cfg.cells, ',')) v.push_back(XValue::parse(s));
  if (v.size() != 8) throw Error(ErrorCode::WidthMismatch, "--cells needs eight values (C, 1, 2, 3, 12, 13, 23, 123)");
  return v;
}

int cmd_golden(const RunConfig& cfg, std::ostream& out) {
  if (cfg.golden != "table1") throw Error(ErrorCode::InvalidArgument, "unknown golden instance '" + cfg.golden + "'");
  const Rational alpha = parse_alpha(cfg.alpha);
  const ToyTable t = compute_toy_table(toy_instance(toy_cells(cfg)), alpha);
  const ToyTable expected = golden_toy_table();
  const bool comparable = alpha == expected.alpha;
  if (cfg.records()) {
    for (const auto& row : t.rows) {
      Json j{{"type", "row"}, {"name", row.name}, {"e", row.e.str()}, {"post", row.post.str()}};
      j["fsp"] = row.fsp ? Json(rational_str(*row.fsp)) : Json(nullptr);
      j["ebh"] = row.ebh.str();
      j["closed_ebh"] = row.closed_ebh.str();
      emit(out, j);
    }
  } else {
    out << render_table(t);
  }
  if (!comparable) {
    if (cfg.records()) {
      emit(out, Json{{"type", "golden"}, {"compared", false}, {"alpha", rational_str(alpha)}});
    } else {
      out << "\nrecomputed at alpha = " << rational_str(alpha)
          << "; not compared with the golden table (which uses alpha = 1/20)\n";
    }
    return kPass;
  }
  const TableDiff d = diff_tables(expected, t);
  if (cfg.records()) {
    for (const auto& c : d.mismatches) {
      emit(out, Json{{"type", "mismatch"}, {"row", c.row}, {"column", c.column}, {"expected", c.expected},
                     {"actual", c.actual}});
    }
    emit(out, Json{{"type", "golden"}, {"compared", true}, {"evidence_cells", d.evidence_cells},
                   {"evidence_matches", d.evidence_matches}, {"fsp_cells", d.fsp_cells},
                   {"fsp_matches", d.fsp_matches}, {"pass", d.ok()}});
  } else {
    out << "\nevidence cells: " << d.evidence_matches << "/" << d.evidence_cells << " match\n";
    out << "FSP cells: " << d.fsp_matches << "/" << d.fsp_cells << " match\n";
    for (const auto& c : d.mismatches) {
      out << "  mismatch " << c.row << " / " << c.column << ": expected " << c.expected << ", got " << c.actual << "\n";
    }
    out << "table1: " << (d.ok() ? "pass" : "FAIL") << "\n";
  }
  return d.ok() ? kPass : kViolation;
}

struct MtpInput {
  std::optional<HypothesisSpace> space;
  EFunction e;
  std::vector<HypId> family;
  Names names;
};

MtpInput mtp_input(const RunConfig& cfg) {
  MtpInput in;
  if (cfg.evidence.empty()) {
    ToyInstance inst = toy_instance(toy_cells(cfg));
    in.space.emplace(inst.space);
    in.e = inst.e;
    for (std::size_t c = 0; c < inst.cells.size(); ++c) in.names.given[index(inst.cells[c])] = inst.cell_names[c];
    std::vector<std::string> wanted = split(cfg.family, ',');
    for (std::size_t g = 0; g < inst.family.size(); ++g) {
      in.names.given[index(inst.family[g])] = inst.family_names[g];
      if (wanted.empty() || std::find(wanted.begin(), wanted.end(), inst.family_names[g]) != wanted.end()) {
        in.family.push_back(inst.family[g]);
      }
    }
    for (const auto& w : wanted) {
      if (std::find(inst.family_names.begin(), inst.family_names.end(), w) == inst.family_names.end()) {
        throw Error(ErrorCode::InvalidArgument, "unknown family member '" + w + "'");
      }
    }
    in.names.space = &*in.space;
    return in;
  }
  in.space.emplace(load_space(cfg));
  const Source src{"evidence file", cfg.evidence};
  const YAML::Node doc = load_yaml(cfg.evidence, src.what);
  if (!doc.IsMap() || !doc["evidence"]) throw Error(ErrorCode::MissingEntry, src.at("evidence") + ": field is required");
  in.e = parse_evidence_map(doc["evidence"], *in.space, src, "evidence");
  in.names.space = &*in.space;
  std::vector<std::pair<std::string, HypId>> named;
  if (const YAML::Node fam = doc["family"]) {
    if (!fam.IsMap()) throw Error(ErrorCode::InvalidArgument, src.at("family") + ": expected {name: [points]}");
    for (const auto& kv : fam) {
      const std::string name = kv.first.Scalar();
      PointSet s = PointSet::empty(in.space->width());
      if (!kv.second.IsSequence()) throw Error(ErrorCode::InvalidArgument, src.at("family." + name) + ": expected a list");
      for (const auto& p : kv.second) {
        s = s | parse_hypothesis(p.Scalar(), in.space->model(), src, "family." + name);
      }
      auto id = in.space->cls().find(s);
      if (!id) throw Error(ErrorCode::InvalidArgument, src.at("family." + name) + ": not a member of the class");
      named.emplace_back(name, *id);
      in.names.given[index(*id)] = name;
    }
  } else {
    for (auto h : in.space->cls().nonempty_ids()) named.emplace_back(in.space->describe(h), h);
  }
  const std::vector<std::string> wanted = split(cfg.family, ',');
  for (const auto& w : wanted) {
    if (std::none_of(named.begin(), named.end(), [&](const auto& n) { return n.first == w; })) {
      throw Error(ErrorCode::InvalidArgument, "unknown family member '" + w + "'");
    }
  }
  for (const auto& [name, id] : named) {
    if (wanted.empty() || std::find(wanted.begin(), wanted.end(), name) != wanted.end()) in.family.push_back(id);
  }
  return in;
}

int cmd_mtp(const RunConfig& cfg, std::ostream& out) {
  if (!cfg.golden.empty()) return cmd_golden(cfg, out);
  const Rational alpha = parse_alpha(cfg.alpha);
  MtpInput in = mtp_input(cfg);
  in.names.space = &*in.space;
  const HypothesisSpace& space = *in.space;
  const Names& name = in.names;

  Selection rejected;
  std::optional<EFunction> shown;
  std::string shown_label;
  std::optional<bool> fixed;
  if (cfg.procedure == "ebh" || cfg.procedure == "closed-ebh") {
    const EbhResult r = cfg.procedure == "ebh" ? ebh_procedure(in.e, space, in.family, alpha)
                                               : closed_ebh(in.e, space, in.family, alpha);
    rejected = r.rejected;
    shown = r.binary;
    shown_label = "binary";
  } else if (cfg.procedure == "self-consistent") {
    const SelfConsistent sc = self_consistent_selection(in.e, space, in.family, alpha, cfg.caps.max_family_size);
    rejected = sc.selection;
    fixed = sc.fixed_point;
    shown = sc.post;
    shown_label = "post";
  } else if (cfg.procedure == "fer") {
    const EFunction post = postprocess_selection(in.e, space, in.family);
    rejected = rejection_map(in.e, space, in.family, in.family, alpha);
    shown = post;
    shown_label = "post";
  } else if (cfg.procedure == "fwe") {
    space.require_intersection_closed("familywise rejection");
    for (auto g : in.family) {
      if (in.e[g] >= reciprocal(XValue(alpha))) rejected.push_back(g);
    }
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown procedure '" + cfg.procedure + "'");
  }

  std::vector<HypId> rows;
  if (space.intersection_closed()) {
    for (std::size_t p = 0; p < space.width(); ++p) {
      const HypId h = space.least(p);
      if (std::find(rows.begin(), rows.end(), h) == rows.end()) rows.push_back(h);
    }
  }
  for (auto g : in.family) {
    if (std::find(rows.begin(), rows.end(), g) == rows.end()) rows.push_back(g);
  }
  if (cfg.records()) {
    for (auto h : rows) {
      Json j{{"type", "row"}, {"name", name(h)}, {"e", in.e[h].str()}};
      if (shown) j[shown_label] = (*shown)[h].str();
      emit(out, j);
    }
    std::vector<std::string> rej;
    for (auto g : rejected) rej.push_back(name(g));
    Json s{{"type", "selection"}, {"procedure", cfg.procedure}, {"alpha", rational_str(alpha)}, {"rejected", rej}};
    if (fixed) s["fixed_point"] = *fixed;
    emit(out, s);
    return kPass;
  }
  std::size_t width = 8;
  for (auto h : rows) width = std::max(width, name(h).size());
  out << "procedure: " << cfg.procedure << " at alpha = " << rational_str(alpha) << "\n\n";
  out << "  " << std::left << std::setw(static_cast<int>(width)) << "" << std::right << std::setw(10) << "e";
  if (shown) out << std::setw(10) << shown_label;
  out << "\n";
  for (auto h : rows) {
    out << "  " << std::left << std::setw(static_cast<int>(width)) << name(h) << std::right << std::setw(10)
        << in.e[h].pretty();
    if (shown) out << std::setw(10) << (*shown)[h].pretty();
    out << "\n";
  }
  out << "\nrejected:";
  if (rejected.empty()) out << " none";
  for (auto g : rejected) out << " " << name(g);
  out << "\n";
  if (fixed && !*fixed) out << "no self-consistent selection exists\n";
  return kPass;
}

// ---- decide ---------------------------------------------------------------

std::vector<std::size_t> rank_by(const std::vector<std::optional<XValue>>& score) {
  std::vector<std::size_t> order;
  for (std::size_t d = 0; d < score.size(); ++d) {
    if (score[d]) order.push_back(d);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return *score[a] < *score[b]; });
  return order;
}

int cmd_decide(const RunConfig& cfg, std::ostream& out) {
  if (cfg.loss.empty()) throw Error(ErrorCode::InvalidArgument, "decide needs --loss");
  if (cfg.kernel.empty()) throw Error(ErrorCode::InvalidArgument, "decide needs --kernel");
  std::optional<HypothesisSpace> given;
  if (!cfg.space.empty()) given.emplace(load_space(cfg));
  const ModelFile m = load_model(cfg, given ? &given->model().labels() : nullptr);
  const Model model = given ? given->model() : Model(m.labels, cfg.caps.max_points);
  const Source lsrc{"loss file", cfg.loss};
  const DecisionFile df = parse_decisions(load_yaml(cfg.loss, lsrc.what), lsrc, model.labels(), &m.pa);
  const ConsequenceTable table = df.table();
  const ConsequenceClass cc = build_consequence_class(table, model);
  const HypothesisSpace space = given ? *given : cc.space;
  require_order_measurable(table, space);
  const auto& cls = space.cls();
  const Source ksrc{"kernel file", cfg.kernel};
  const EKernel k = parse_kernel(load_yaml(cfg.kernel, ksrc.what), space, m.outcomes, &m.pa, ksrc);
  const auto& decisions = table.decisions;

  const NumericLoss* loss = df.numeric() ? &std::get<NumericLoss>(df.problem) : nullptr;
  std::optional<OptimalityClass> oc;
  if (loss) oc = optimality_class(*loss);

  auto names = [&](const std::vector<std::size_t>& order) {
    std::vector<std::string> v;
    for (auto d : order) v.push_back(decisions[d]);
    return v;
  };
  for (std::size_t x = 0; x < k.outcomes(); ++x) {
    const std::string xl = m.outcomes.label(x);
    if (!cfg.records()) out << "outcome " << xl << ":\n";
    if (oc) {
      std::vector<std::optional<XValue>> against(decisions.size());
      for (std::size_t d = 0; d < decisions.size(); ++d) {
        if (auto id = cls.find(oc->optimal_for[d])) against[d] = k(*id, x);
      }
      const auto order = rank_by(against);
      std::vector<std::optional<XValue>> integ(decisions.size());
      for (std::size_t d = 0; d < decisions.size(); ++d) integ[d] = integrated_loss(*loss, k.column(x), cls, d);
      const auto by_loss = rank_by(integ);
      if (cfg.records()) {
        Json ev = Json::array();
        for (auto d : order) ev.push_back(against[d]->str());
        emit(out, Json{{"type", "ranking"}, {"outcome", xl}, {"kind", "optimality"}, {"order", names(order)},
                       {"evidence", ev}});
        Json il = Json::array();
        for (auto d : by_loss) il.push_back(integ[d]->str());
        emit(out, Json{{"type", "ranking"}, {"outcome", xl}, {"kind", "integrated_loss"}, {"order", names(by_loss)},
                       {"value", il}});
      } else {
        out << "  evidence against optimality:";
        for (auto d : order) out << " " << decisions[d] << " (" << against[d]->pretty() << ")";
        if (order.size() < decisions.size()) out << "  [decisions whose optimality set is not in the class omitted]";
        out << "\n  E-integrated loss:";
        for (auto d : by_loss) out << " " << decisions[d] << " (" << integ[d]->pretty() << ")";
        out << "\n";
      }
    }
    const Admissibility adm = admissible_decisions(k.column(x), cls, table);
    if (cfg.records()) {
      emit(out, Json{{"type", "admissible"}, {"outcome", xl}, {"decisions", names(adm.admissible)}});
    } else {
      out << "  admissible:";
      for (auto d : adm.admissible) out << " " << decisions[d];
      out << "\n";
    }
  }

  bool pass = true;
  if (cfg.bound == "grunwald") {
    if (!loss) throw Error(ErrorCode::InvalidArgument, "the Grunwald bound needs a numeric loss");
    const GrunwaldReport g = check_grunwald_bound(k, m.pa, space, *loss);
    for (std::size_t p = 0; p < g.statistic.size(); ++p) {
      if (cfg.records()) {
        emit(out, Json{{"type", "statistic"}, {"kind", "grunwald"}, {"point", model.label(p)},
                       {"value", g.statistic[p].str()}, {"econsequence", g.econsequence[p].str()},
                       {"ok", g.statistic[p] <= XValue::one()}});
      } else {
        if (p == 0) out << "\n  point   grunwald   e-consequence\n";
        out << "  " << std::left << std::setw(6) << model.label(p) << std::right << std::setw(10)
            << g.statistic[p].pretty() << std::setw(16) << g.econsequence[p].pretty() << "\n";
      }
    }
    pass = g.holds && g.slack_violations == 0 && g.markov_violations == 0;
    return verdict(cfg, out, "grunwald", pass, pass ? "" : "bound or pointwise slack violated");
  }
  ConsequenceReport r;
  if (cfg.bound == "econsequence") {
    r = check_econsequence_bound(k, m.pa, space, table);
  } else if (cfg.bound == "probability") {
    r = check_probability_bound(k, m.pa, space, table, parse_alpha(cfg.alpha));
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown bound '" + cfg.bound + "'");
  }
  std::string witness;
  for (const auto& b : r.entries) {
    if (cfg.records()) {
      emit(out, Json{{"type", "statistic"}, {"kind", cfg.bound}, {"benchmark", model.label(b.row)},
                     {"point", model.label(b.point)}, {"value", b.statistic.str()}, {"ok", b.ok}});
    } else {
      out << "  benchmark L_" << model.label(b.row) << " under " << model.label(b.point) << ": "
          << b.statistic.pretty() << (b.ok ? "" : "   VIOLATION") << "\n";
    }
    if (!b.ok && witness.empty()) {
      witness = "benchmark L_" + model.label(b.row) + " under " + model.label(b.point) + ": " + b.statistic.str();
    }
  }
  return verdict(cfg, out, cfg.bound, r.holds, witness);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  if (const char* env = std::getenv("EMEASURE_CAPS")) {
    try {
      cfg.caps = parse_caps(env);
    } catch (const Error& e) {
      err << "error: EMEASURE_CAPS: " << e.what() << "\n";
      return kInputError;
    }
  }

  CLI::App app{"Exact evidence calculus over finite models", "emeasure"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand all help");
  std::size_t cap_members = 0;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--format", cfg.format, "text or records")->check(CLI::IsMember({"text", "records"}));
    sub->add_option("--cap-members", cap_members, "Member cap for brute-force closure")->check(CLI::PositiveNumber);
  };

  auto* space = app.add_subcommand("space", "Describe a hypothesis space");
  space->add_option("--space", cfg.space, "Space file")->required();
  common(space);

  auto* closure = app.add_subcommand("closure", "Close an E-function into an E-measure");
  closure->add_option("--space", cfg.space, "Space file")->required();
  closure->add_option("--evidence", cfg.evidence, "Evidence file")->required();
  common(closure);

  auto* check = app.add_subcommand("check", "Check a kernel or process exactly");
  check->add_option("--space", cfg.space, "Space file")->required();
  check->add_option("--kernel", cfg.kernel, "Kernel or process file")->required();
  check->add_option("--model", cfg.model, "Model file")->required();
  check->add_option("--check", cfg.check, "validity|anytime|posthoc|predictive|fwe|fer")
      ->check(CLI::IsMember({"validity", "anytime", "posthoc", "predictive", "fwe", "fer"}));
  check->add_option("--alpha", cfg.alpha, "Level added to the post-hoc grid");
  common(check);

  auto* mtp = app.add_subcommand("mtp", "Multiple testing on one evidence table");
  mtp->add_option("--space", cfg.space, "Space file");
  mtp->add_option("--evidence", cfg.evidence, "Evidence file; the built-in toy instance when absent");
  mtp->add_option("--family", cfg.family, "Comma-separated family member names");
  mtp->add_option("--procedure", cfg.procedure, "ebh|closed-ebh|self-consistent|fer|fwe")
      ->check(CLI::IsMember({"ebh", "closed-ebh", "self-consistent", "fer", "fwe"}));
  mtp->add_option("--alpha", cfg.alpha, "Level");
  mtp->add_option("--golden", cfg.golden, "Built-in golden comparison (table1)");
  mtp->add_option("--cells", cfg.cells, "Eight comma-separated cell values for the toy instance");
  common(mtp);

  auto* decide = app.add_subcommand("decide", "Decision bounds and rankings");
  decide->add_option("--loss", cfg.loss, "Decision file")->required();
  decide->add_option("--kernel", cfg.kernel, "Kernel file")->required();
  decide->add_option("--model", cfg.model, "Model file")->required();
  decide->add_option("--space", cfg.space, "Space file; the consequence class when absent");
  decide->add_option("--bound", cfg.bound, "econsequence|grunwald|probability")
      ->check(CLI::IsMember({"econsequence", "grunwald", "probability"}));
  decide->add_option("--alpha", cfg.alpha, "Level for the probability bound");
  common(decide);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kPass : kInputError;
  }
  if (cap_members > 0) cfg.caps.max_bruteforce_members = cap_members;
  cfg.subcommand = app.get_subcommands().front()->get_name();

  try {
    if (cfg.subcommand == "space") return cmd_space(cfg, out);
    if (cfg.subcommand == "closure") return cmd_closure(cfg, out);
    if (cfg.subcommand == "check") return cmd_check(cfg, out);
    if (cfg.subcommand == "mtp") return cmd_mtp(cfg, out);
    return cmd_decide(cfg, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const YAML::Exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
}

}  // namespace emeasure::cli
