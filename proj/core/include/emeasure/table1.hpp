#pragma once

#include <optional>
#include <string>
#include <vector>

#include "emeasure/multiplicity.hpp"

namespace emeasure {

/// The eight-cell toy instance: three overlapping hypotheses G1, G2, G3 whose
/// Venn cells C, 1, 2, 3, 12, 13, 23, 123 are the points of the model. The
/// class is the power set of the cells, so every cell is a least hypothesis.
struct ToyInstance {
  HypothesisSpace space;
  EFunction e;                          ///< closure of the cell values
  std::vector<std::string> cell_names;  ///< "H_C", "H_1", ...
  std::vector<HypId> cells;
  std::vector<std::string> family_names;  ///< "G_1", "G_2", "G_3"
  std::vector<HypId> family;
};

/// Cell values in the order C, 1, 2, 3, 12, 13, 23, 123.
std::vector<XValue> default_cell_values();
ToyInstance toy_instance(const std::vector<XValue>& cell_values = default_cell_values());

struct ToyRow {
  std::string name;
  XValue e;
  XValue post;                 ///< e^{S*}
  std::optional<Rational> fsp; ///< cells only
  XValue ebh;
  XValue closed_ebh;
};

struct ToyTable {
  Rational alpha;
  Selection s_star;
  bool fixed_point = false;
  std::vector<ToyRow> rows;  ///< eight cells then three family members
};

ToyTable compute_toy_table(const ToyInstance& inst, const Rational& alpha);

/// Reference values at alpha = 1/20, embedded verbatim.
ToyTable golden_toy_table();

struct CellDiff {
  std::string row;
  std::string column;
  std::string expected;
  std::string actual;
};

struct TableDiff {
  std::size_t evidence_cells = 0;
  std::size_t evidence_matches = 0;
  std::size_t fsp_cells = 0;
  std::size_t fsp_matches = 0;
  std::vector<CellDiff> mismatches;
  bool ok() const { return mismatches.empty(); }
};

TableDiff diff_tables(const ToyTable& expected, const ToyTable& actual);

/// Fixed-width text rendering; byte-stable.
std::string render_table(const ToyTable& t);

}  // namespace emeasure
