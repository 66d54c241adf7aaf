#include "emeasure/table1.hpp"

#include <iomanip>
#include <sstream>

#include "emeasure/errors.hpp"

namespace emeasure {

namespace {

// Cell order C, 1, 2, 3, 12, 13, 23, 123; bit i is cell i.
const char* const kCellNames[] = {"H_C", "H_1", "H_2", "H_3", "H_12", "H_13", "H_23", "H_123"};
const char* const kFamilyNames[] = {"G_1", "G_2", "G_3"};

PointSet cells_in(std::size_t g) {
  static const std::initializer_list<std::size_t> members[] = {{1, 4, 5, 7}, {2, 4, 6, 7}, {3, 5, 6, 7}};
  return PointSet::of(8, members[g]);
}

std::string fsp_str(const std::optional<Rational>& r) { return r ? rational_str(*r) : "--"; }

}  // namespace

std::vector<XValue> default_cell_values() { return {5, 60, 29, 11, 70, 65, 40, 100}; }

ToyInstance toy_instance(const std::vector<XValue>& cell_values) {
  if (cell_values.size() != 8) throw Error(ErrorCode::InvalidArgument, "the toy instance has eight cells");
  Model model({"C", "1", "2", "3", "12", "13", "23", "123"});
  HypothesisSpace space(model, HypothesisClass::power_set(8));
  const auto& cls = space.cls();
  std::vector<XValue> v(cls.size(), XValue::infinity());
  for (std::size_t i = 1; i < cls.size(); ++i) {
    for (std::size_t p : cls.members()[i].points()) v[i] = std::min(v[i], cell_values[p]);
  }
  EFunction e = classify(std::move(v), cls);
  ToyInstance inst{std::move(space), std::move(e), {}, {}, {}, {}};
  for (std::size_t c = 0; c < 8; ++c) {
    inst.cell_names.emplace_back(kCellNames[c]);
    inst.cells.push_back(inst.space.cls().id_of(PointSet::singleton(8, c)));
  }
  for (std::size_t g = 0; g < 3; ++g) {
    inst.family_names.emplace_back(kFamilyNames[g]);
    inst.family.push_back(inst.space.cls().id_of(cells_in(g)));
  }
  return inst;
}

ToyTable compute_toy_table(const ToyInstance& inst, const Rational& alpha) {
  ToyTable t;
  t.alpha = alpha;
  const auto sc = self_consistent_selection(inst.e, inst.space, inst.family, alpha);
  t.s_star = sc.selection;
  t.fixed_point = sc.fixed_point;
  const auto plain = ebh_procedure(inst.e, inst.space, inst.family, alpha);
  const auto closed = closed_ebh(inst.e, inst.space, inst.family, alpha);
  const auto& cls = inst.space.cls();
  for (std::size_t c = 0; c < inst.cells.size(); ++c) {
    const HypId h = inst.cells[c];
    t.rows.push_back({inst.cell_names[c], inst.e[h], sc.post[h], false_selection_proportion(cls, c, sc.selection),
                      plain.binary[h], closed.binary[h]});
  }
  for (std::size_t g = 0; g < inst.family.size(); ++g) {
    const HypId h = inst.family[g];
    t.rows.push_back({inst.family_names[g], inst.e[h], sc.post[h], std::nullopt, plain.binary[h], closed.binary[h]});
  }
  return t;
}

ToyTable golden_toy_table() {
  const XValue inf = XValue::infinity();
  ToyTable t;
  t.alpha = Rational(1, 20);
  t.fixed_point = true;
  t.rows = {
      {"H_C", 5, inf, Rational(0), 0, 0},
      {"H_1", 60, 180, Rational(1, 3), 20, 20},
      {"H_2", 29, 87, Rational(1, 3), 0, 20},
      {"H_3", 11, 33, Rational(1, 3), 0, 20},
      {"H_12", 70, 105, Rational(2, 3), 20, 20},
      {"H_13", 65, XValue::parse("97.5"), Rational(2, 3), 20, 20},
      {"H_23", 40, 60, Rational(2, 3), 0, 20},
      {"H_123", 100, 100, Rational(1), 20, 20},
      {"G_1", 60, XValue::parse("97.5"), std::nullopt, 20, 20},
      {"G_2", 29, 60, std::nullopt, 0, 20},
      {"G_3", 11, 33, std::nullopt, 0, 20},
  };
  return t;
}

TableDiff diff_tables(const ToyTable& expected, const ToyTable& actual) {
  TableDiff d;
  if (expected.rows.size() != actual.rows.size()) {
    d.mismatches.push_back({"*", "rows", std::to_string(expected.rows.size()), std::to_string(actual.rows.size())});
    return d;
  }
  for (std::size_t i = 0; i < expected.rows.size(); ++i) {
    const auto& a = expected.rows[i];
    const auto& b = actual.rows[i];
    auto cell = [&](const char* col, const XValue& x, const XValue& y) {
      ++d.evidence_cells;
      if (x == y) {
        ++d.evidence_matches;
      } else {
        d.mismatches.push_back({a.name, col, x.pretty(), y.pretty()});
      }
    };
    cell("e", a.e, b.e);
    cell("e^S*", a.post, b.post);
    cell("E-BH", a.ebh, b.ebh);
    cell("closed E-BH", a.closed_ebh, b.closed_ebh);
    if (a.fsp || b.fsp) {
      ++d.fsp_cells;
      if (a.fsp == b.fsp) {
        ++d.fsp_matches;
      } else {
        d.mismatches.push_back({a.name, "FSP", fsp_str(a.fsp), fsp_str(b.fsp)});
      }
    }
  }
  return d;
}

std::string render_table(const ToyTable& t) {
  std::ostringstream os;
  os << std::left << std::setw(8) << "row" << std::right << std::setw(8) << "e" << std::setw(8) << "e^S*"
     << std::setw(8) << "FSP" << std::setw(8) << "E-BH" << std::setw(13) << "closed E-BH" << '\n';
  for (const auto& r : t.rows) {
    os << std::left << std::setw(8) << r.name << std::right << std::setw(8) << r.e.pretty() << std::setw(8)
       << r.post.pretty() << std::setw(8) << fsp_str(r.fsp) << std::setw(8) << r.ebh.pretty() << std::setw(13)
       << r.closed_ebh.pretty() << '\n';
  }
  return os.str();
}

}  // namespace emeasure
