#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace emeasure {

/// Caps keeping every family enumerable. All are configurable at call sites.
struct Caps {
  std::size_t max_points = 24;
  std::size_t max_bruteforce_members = 16;
  std::size_t max_powerset_points = 16;
  std::size_t max_tree_depth = 4;
  std::size_t max_tree_branching = 3;
  std::size_t max_stopping_times = 100000;
  std::size_t max_family_size = 20;
};

/// Hard limit of the bitset representation.
inline constexpr std::size_t kMaxWidth = 64;

/// Interned hypothesis handle, an index into HypothesisClass::members().
enum class HypId : std::uint32_t {};

constexpr std::size_t index(HypId id) noexcept { return static_cast<std::size_t>(id); }
constexpr HypId hyp_id(std::size_t i) noexcept { return static_cast<HypId>(i); }

/// A subset of an indexed finite set, stored as a fixed-width bit vector.
class PointSet {
 public:
  PointSet() = default;
  PointSet(std::size_t width, std::uint64_t bits);

  static PointSet empty(std::size_t width) { return PointSet(width, 0); }
  static PointSet full(std::size_t width);
  static PointSet singleton(std::size_t width, std::size_t point);
  static PointSet of(std::size_t width, std::initializer_list<std::size_t> points);

  std::size_t width() const noexcept { return width_; }
  std::uint64_t bits() const noexcept { return bits_; }
  std::size_t count() const noexcept;
  bool is_empty() const noexcept { return bits_ == 0; }
  bool contains(std::size_t point) const noexcept { return (bits_ >> point) & 1U; }
  bool subset_of(const PointSet& other) const noexcept { return (bits_ & ~other.bits_) == 0; }
  std::vector<std::size_t> points() const;

  PointSet operator|(const PointSet& o) const;
  PointSet operator&(const PointSet& o) const;

  /// Binary string, point 0 first: {P1} over 3 points is "100".
  std::string str() const;

  friend bool operator==(const PointSet& a, const PointSet& b) = default;

 private:
  std::size_t width_ = 0;
  std::uint64_t bits_ = 0;
};

/// Canonical member order: popcount first, then numeric bit value.
bool canonical_less(const PointSet& a, const PointSet& b) noexcept;

/// The finite stand-in for the model: an ordered list of unique point labels.
class Model {
 public:
  explicit Model(std::vector<std::string> labels, std::size_t max_points = Caps{}.max_points);
  static Model indexed(std::size_t size, const std::string& prefix = "P");

  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  std::optional<std::size_t> find(const std::string& label) const;

  friend bool operator==(const Model&, const Model&) = default;

 private:
  std::vector<std::string> labels_;
};

/// A union-closed family of subsets containing the empty set.
///
/// Members are deduplicated and kept in canonical order, so the empty set is
/// always HypId 0. The covering (Hasse) relation is precomputed and drives all
/// antitonicity checks.
class HypothesisClass {
 public:
  /// Smallest union-closed family containing the generators and the empty set.
  static HypothesisClass union_closure(std::size_t width, std::span<const PointSet> generators);
  /// Wraps an explicit family; throws NotUnionClosed unless it already is one
  /// (the empty set is added if absent).
  static HypothesisClass from_members(std::size_t width, std::span<const PointSet> members);
  static HypothesisClass power_set(std::size_t width);

  std::size_t width() const noexcept { return width_; }
  std::size_t size() const noexcept { return members_.size(); }
  const std::vector<PointSet>& members() const noexcept { return members_; }
  const PointSet& at(HypId id) const { return members_.at(index(id)); }
  std::optional<HypId> find(const PointSet& s) const;
  /// Like find, but throws NotMeasurable naming the set.
  HypId id_of(const PointSet& s) const;
  bool contains(const PointSet& s) const { return find(s).has_value(); }

  static constexpr HypId empty_id() noexcept { return HypId{0}; }
  std::vector<HypId> ids() const;
  std::vector<HypId> nonempty_ids() const;

  /// Covering pairs (lower, upper): lower strictly inside upper, nothing between.
  const std::vector<std::pair<HypId, HypId>>& hasse() const noexcept { return hasse_; }

  friend bool operator==(const HypothesisClass& a, const HypothesisClass& b) {
    return a.width_ == b.width_ && a.members_ == b.members_;
  }

 private:
  HypothesisClass(std::size_t width, std::vector<PointSet> members);

  std::size_t width_ = 0;
  std::vector<PointSet> members_;
  std::unordered_map<std::uint64_t, HypId> index_;
  std::vector<std::pair<HypId, HypId>> hasse_;
};

struct SpaceReport {
  bool union_closed = false;
  /// Closed under all intersections of member subsets, including the empty
  /// intersection (so the full model must be a member).
  bool intersection_closed = false;
  bool contains_full_model = false;
  /// least[P] = intersection of members containing P; present iff the two
  /// flags above hold.
  std::optional<std::vector<HypId>> least;
};

SpaceReport analyze(const HypothesisClass& cls);

/// A model together with a hypothesis class over it.
class HypothesisSpace {
 public:
  HypothesisSpace(Model model, HypothesisClass cls);

  const Model& model() const noexcept { return model_; }
  const HypothesisClass& cls() const noexcept { return cls_; }
  const SpaceReport& report() const noexcept { return report_; }
  std::size_t width() const noexcept { return cls_.width(); }

  bool intersection_closed() const noexcept { return report_.least.has_value(); }
  /// Throws NotIntersectionClosed when least hypotheses do not exist.
  void require_intersection_closed(std::string_view operation) const;
  HypId least(std::size_t point) const;
  const std::vector<HypId>& least_map() const;

  /// "{P1,P2}" style rendering with model labels.
  std::string describe(const PointSet& s) const;
  std::string describe(HypId id) const { return describe(cls_.at(id)); }

 private:
  Model model_;
  HypothesisClass cls_;
  SpaceReport report_;
};

/// {least[P] : P in H}, deduplicated and in canonical order.
std::vector<HypId> canonical_cover(const HypothesisSpace& space, HypId h);

/// Relation matrix stored as row bitsets: row(i) holds every j with P_i <= P_j,
/// which is exactly the principal upper set of P_i.
class Preorder {
 public:
  explicit Preorder(std::size_t size);
  /// Builds from explicit rows; validates reflexivity and transitivity.
  static Preorder from_rows(std::vector<PointSet> rows);
  static Preorder identity(std::size_t size);
  static Preorder full(std::size_t size);

  std::size_t size() const noexcept { return rows_.size(); }
  bool related(std::size_t i, std::size_t j) const { return rows_.at(i).contains(j); }
  void set(std::size_t i, std::size_t j);
  const PointSet& upper_set(std::size_t i) const { return rows_.at(i); }

  bool reflexive() const;
  bool transitive() const;
  /// Throws NotAPreorder with the first violating triple.
  void validate() const;

  friend bool operator==(const Preorder&, const Preorder&) = default;

 private:
  std::vector<PointSet> rows_;
};

HypothesisClass class_from_preorder(const Preorder& pre);
Preorder preorder_from_class(const HypothesisSpace& space);

/// {f^-1(G) : G in target} for a total map f from [0, domain_width) into the
/// target's points.
HypothesisClass preimage_class(const HypothesisClass& target, std::span<const std::size_t> f,
                               std::size_t domain_width);

/// f^-1(G) as a point set over the domain.
PointSet preimage(const PointSet& g, std::span<const std::size_t> f, std::size_t domain_width);

}  // namespace emeasure
