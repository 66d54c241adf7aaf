#include "emeasure/hypothesis_space.hpp"

#include <algorithm>
#include <bit>
#include <unordered_set>

#include "emeasure/errors.hpp"

namespace emeasure {

namespace {

std::uint64_t width_mask(std::size_t width) {
  return width >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << width) - 1);
}

void require_width(std::size_t width) {
  if (width == 0 || width > kMaxWidth) {
    throw Error(ErrorCode::InvalidArgument,
                "point-set width " + std::to_string(width) + " outside [1, 64]");
  }
}

void require_same_width(const PointSet& s, std::size_t width) {
  if (s.width() != width) {
    throw Error(ErrorCode::WidthMismatch, "point set of width " + std::to_string(s.width()) +
                                              " used where width " + std::to_string(width) +
                                              " is expected");
  }
}

}  // namespace

// ---------------------------------------------------------------- PointSet

PointSet::PointSet(std::size_t width, std::uint64_t bits) : width_(width), bits_(bits) {
  require_width(width);
  if ((bits & ~width_mask(width)) != 0) {
    throw Error(ErrorCode::WidthMismatch, "bits set beyond width " + std::to_string(width));
  }
}

PointSet PointSet::full(std::size_t width) { return PointSet(width, width_mask(width)); }

PointSet PointSet::singleton(std::size_t width, std::size_t point) {
  if (point >= width) {
    throw Error(ErrorCode::InvalidArgument, "point index " + std::to_string(point) + " out of range");
  }
  return PointSet(width, std::uint64_t{1} << point);
}

PointSet PointSet::of(std::size_t width, std::initializer_list<std::size_t> points) {
  PointSet s = empty(width);
  for (std::size_t p : points) s = s | singleton(width, p);
  return s;
}

std::size_t PointSet::count() const noexcept { return static_cast<std::size_t>(std::popcount(bits_)); }

std::vector<std::size_t> PointSet::points() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < width_; ++i) {
    if (contains(i)) out.push_back(i);
  }
  return out;
}

PointSet PointSet::operator|(const PointSet& o) const {
  require_same_width(o, width_);
  return PointSet(width_, bits_ | o.bits_);
}

PointSet PointSet::operator&(const PointSet& o) const {
  require_same_width(o, width_);
  return PointSet(width_, bits_ & o.bits_);
}

std::string PointSet::str() const {
  std::string s(width_, '0');
  for (std::size_t i = 0; i < width_; ++i) {
    if (contains(i)) s[i] = '1';
  }
  return s;
}

bool canonical_less(const PointSet& a, const PointSet& b) noexcept {
  const auto ca = a.count(), cb = b.count();
  if (ca != cb) return ca < cb;
  return a.bits() < b.bits();
}

// ------------------------------------------------------------------- Model

Model::Model(std::vector<std::string> labels, std::size_t max_points) : labels_(std::move(labels)) {
  if (labels_.empty()) throw Error(ErrorCode::InvalidArgument, "a model needs at least one point");
  if (labels_.size() > max_points || labels_.size() > kMaxWidth) {
    throw Error(ErrorCode::CapExceeded, "model has " + std::to_string(labels_.size()) +
                                            " points; the configured cap is " +
                                            std::to_string(std::min(max_points, kMaxWidth)));
  }
  std::unordered_set<std::string> seen;
  for (const auto& l : labels_) {
    if (!seen.insert(l).second) throw Error(ErrorCode::InvalidArgument, "duplicate point label '" + l + "'");
  }
}

Model Model::indexed(std::size_t size, const std::string& prefix) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < size; ++i) labels.push_back(prefix + std::to_string(i + 1));
  return Model(std::move(labels));
}

std::optional<std::size_t> Model::find(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - labels_.begin());
}

// --------------------------------------------------------- HypothesisClass

HypothesisClass::HypothesisClass(std::size_t width, std::vector<PointSet> members)
    : width_(width), members_(std::move(members)) {
  std::sort(members_.begin(), members_.end(), canonical_less);
  for (std::size_t i = 0; i < members_.size(); ++i) index_.emplace(members_[i].bits(), hyp_id(i));

  // Covering pairs. Supersets of i are visited in canonical order, so any
  // intermediate member is seen (and accepted as a cover) before j.
  for (std::size_t i = 0; i < members_.size(); ++i) {
    std::vector<std::size_t> covers;
    for (std::size_t j = i + 1; j < members_.size(); ++j) {
      if (members_[j] == members_[i] || !members_[i].subset_of(members_[j])) continue;
      bool direct = true;
      for (std::size_t k : covers) {
        if (members_[k].subset_of(members_[j])) {
          direct = false;
          break;
        }
      }
      if (direct) covers.push_back(j);
    }
    for (std::size_t j : covers) hasse_.emplace_back(hyp_id(i), hyp_id(j));
  }
}

HypothesisClass HypothesisClass::union_closure(std::size_t width, std::span<const PointSet> generators) {
  require_width(width);
  std::unordered_set<std::uint64_t> seen{0};
  std::vector<std::uint64_t> members{0};
  std::vector<std::uint64_t> work;
  for (const auto& g : generators) {
    require_same_width(g, width);
    if (seen.insert(g.bits()).second) {
      members.push_back(g.bits());
      work.push_back(g.bits());
    }
  }
  while (!work.empty()) {
    const std::uint64_t w = work.back();
    work.pop_back();
    for (std::size_t i = 0; i < members.size(); ++i) {
      const std::uint64_t u = w | members[i];
      if (seen.insert(u).second) {
        members.push_back(u);
        work.push_back(u);
      }
    }
  }
  std::vector<PointSet> sets;
  sets.reserve(members.size());
  for (auto b : members) sets.emplace_back(width, b);
  return HypothesisClass(width, std::move(sets));
}

HypothesisClass HypothesisClass::from_members(std::size_t width, std::span<const PointSet> members) {
  require_width(width);
  std::unordered_set<std::uint64_t> seen{0};
  std::vector<PointSet> sets{PointSet::empty(width)};
  for (const auto& m : members) {
    require_same_width(m, width);
    if (seen.insert(m.bits()).second) sets.push_back(m);
  }
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (std::size_t j = i + 1; j < sets.size(); ++j) {
      if (!seen.contains(sets[i].bits() | sets[j].bits())) {
        throw Error(ErrorCode::NotUnionClosed, "union of " + sets[i].str() + " and " + sets[j].str() +
                                                   " is not a member");
      }
    }
  }
  return HypothesisClass(width, std::move(sets));
}

HypothesisClass HypothesisClass::power_set(std::size_t width) {
  require_width(width);
  if (width > 24) throw Error(ErrorCode::CapExceeded, "power set over more than 24 points");
  std::vector<PointSet> sets;
  for (std::uint64_t b = 0; b < (std::uint64_t{1} << width); ++b) sets.emplace_back(width, b);
  return HypothesisClass(width, std::move(sets));
}

std::optional<HypId> HypothesisClass::find(const PointSet& s) const {
  if (s.width() != width_) return std::nullopt;
  auto it = index_.find(s.bits());
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

HypId HypothesisClass::id_of(const PointSet& s) const {
  require_same_width(s, width_);
  if (auto id = find(s)) return *id;
  throw Error(ErrorCode::NotMeasurable, "set " + s.str() + " is not a member of the hypothesis class");
}

std::vector<HypId> HypothesisClass::ids() const {
  std::vector<HypId> out;
  out.reserve(members_.size());
  for (std::size_t i = 0; i < members_.size(); ++i) out.push_back(hyp_id(i));
  return out;
}

std::vector<HypId> HypothesisClass::nonempty_ids() const {
  std::vector<HypId> out;
  for (std::size_t i = 1; i < members_.size(); ++i) out.push_back(hyp_id(i));
  return out;
}

// ------------------------------------------------------------------ analyze

SpaceReport analyze(const HypothesisClass& cls) {
  SpaceReport r;
  const auto& m = cls.members();
  r.union_closed = true;
  bool pairwise_meets = true;
  for (std::size_t i = 0; i < m.size() && (r.union_closed || pairwise_meets); ++i) {
    for (std::size_t j = i + 1; j < m.size(); ++j) {
      if (r.union_closed && !cls.contains(m[i] | m[j])) r.union_closed = false;
      if (pairwise_meets && !cls.contains(m[i] & m[j])) pairwise_meets = false;
    }
  }
  r.contains_full_model = cls.contains(PointSet::full(cls.width()));
  r.intersection_closed = pairwise_meets && r.contains_full_model;
  if (r.intersection_closed) {
    std::vector<HypId> least(cls.width());
    for (std::size_t p = 0; p < cls.width(); ++p) {
      PointSet meet = PointSet::full(cls.width());
      for (const auto& h : m) {
        if (h.contains(p)) meet = meet & h;
      }
      least[p] = cls.id_of(meet);
    }
    r.least = std::move(least);
  }
  return r;
}

// --------------------------------------------------------- HypothesisSpace

HypothesisSpace::HypothesisSpace(Model model, HypothesisClass cls)
    : model_(std::move(model)), cls_(std::move(cls)), report_(analyze(cls_)) {
  if (model_.size() != cls_.width()) {
    throw Error(ErrorCode::WidthMismatch, "model has " + std::to_string(model_.size()) +
                                              " points but the class has width " +
                                              std::to_string(cls_.width()));
  }
}

void HypothesisSpace::require_intersection_closed(std::string_view operation) const {
  if (!intersection_closed()) {
    throw Error(ErrorCode::NotIntersectionClosed,
                std::string(operation) + " requires an intersection-closed hypothesis space");
  }
}

HypId HypothesisSpace::least(std::size_t point) const {
  require_intersection_closed("least hypothesis lookup");
  return report_.least->at(point);
}

const std::vector<HypId>& HypothesisSpace::least_map() const {
  require_intersection_closed("least hypothesis lookup");
  return *report_.least;
}

std::string HypothesisSpace::describe(const PointSet& s) const {
  std::string out = "{";
  bool first = true;
  for (std::size_t p : s.points()) {
    if (!first) out += ",";
    out += model_.label(p);
    first = false;
  }
  return out + "}";
}

std::vector<HypId> canonical_cover(const HypothesisSpace& space, HypId h) {
  space.require_intersection_closed("canonical_cover");
  std::vector<HypId> out;
  for (std::size_t p : space.cls().at(h).points()) out.push_back(space.least(p));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ----------------------------------------------------------------- Preorder

Preorder::Preorder(std::size_t size) {
  require_width(size);
  rows_.assign(size, PointSet::empty(size));
}

Preorder Preorder::from_rows(std::vector<PointSet> rows) {
  if (rows.empty()) throw Error(ErrorCode::InvalidArgument, "empty preorder");
  Preorder p(rows.size());
  for (const auto& r : rows) require_same_width(r, rows.size());
  p.rows_ = std::move(rows);
  p.validate();
  return p;
}

Preorder Preorder::identity(std::size_t size) {
  Preorder p(size);
  for (std::size_t i = 0; i < size; ++i) p.set(i, i);
  return p;
}

Preorder Preorder::full(std::size_t size) {
  Preorder p(size);
  for (auto& r : p.rows_) r = PointSet::full(size);
  return p;
}

void Preorder::set(std::size_t i, std::size_t j) {
  rows_.at(i) = rows_.at(i) | PointSet::singleton(size(), j);
}

bool Preorder::reflexive() const {
  for (std::size_t i = 0; i < size(); ++i) {
    if (!related(i, i)) return false;
  }
  return true;
}

bool Preorder::transitive() const {
  // i <= j implies row(j) is inside row(i).
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t j : rows_[i].points()) {
      if (!rows_[j].subset_of(rows_[i])) return false;
    }
  }
  return true;
}

void Preorder::validate() const {
  for (std::size_t i = 0; i < size(); ++i) {
    if (!related(i, i)) {
      throw Error(ErrorCode::NotAPreorder, "relation is not reflexive at index " + std::to_string(i));
    }
  }
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t j : rows_[i].points()) {
      for (std::size_t k : rows_[j].points()) {
        if (!related(i, k)) {
          throw Error(ErrorCode::NotAPreorder, "relation is not transitive: " + std::to_string(i) +
                                                   "<=" + std::to_string(j) + " and " +
                                                   std::to_string(j) + "<=" + std::to_string(k) +
                                                   " but not " + std::to_string(i) + "<=" +
                                                   std::to_string(k));
        }
      }
    }
  }
}

HypothesisClass class_from_preorder(const Preorder& pre) {
  pre.validate();
  std::vector<PointSet> gens;
  for (std::size_t i = 0; i < pre.size(); ++i) gens.push_back(pre.upper_set(i));
  return HypothesisClass::union_closure(pre.size(), gens);
}

Preorder preorder_from_class(const HypothesisSpace& space) {
  space.require_intersection_closed("preorder_from_class");
  std::vector<PointSet> rows;
  for (std::size_t p = 0; p < space.width(); ++p) rows.push_back(space.cls().at(space.least(p)));
  return Preorder::from_rows(std::move(rows));
}

PointSet preimage(const PointSet& g, std::span<const std::size_t> f, std::size_t domain_width) {
  if (f.size() != domain_width) {
    throw Error(ErrorCode::InvalidArgument, "map is not total: " + std::to_string(f.size()) +
                                                " images for " + std::to_string(domain_width) +
                                                " domain points");
  }
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] >= g.width()) {
      throw Error(ErrorCode::InvalidArgument, "image " + std::to_string(f[i]) + " of point " +
                                                  std::to_string(i) + " is outside the target");
    }
    if (g.contains(f[i])) bits |= std::uint64_t{1} << i;
  }
  return PointSet(domain_width, bits);
}

HypothesisClass preimage_class(const HypothesisClass& target, std::span<const std::size_t> f,
                               std::size_t domain_width) {
  std::vector<PointSet> sets;
  for (const auto& g : target.members()) sets.push_back(preimage(g, f, domain_width));
  return HypothesisClass::from_members(domain_width, sets);
}

}  // namespace emeasure
