#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "emeasure/kernels.hpp"

namespace emeasure {

/// A finite rooted tree whose leaves, all at depth T, are the outcomes.
/// Nodes at depth t are the atoms of the information available at time t.
class FiltrationTree {
 public:
  /// parents[i] is the parent of node i, or -1 for the single root.
  static FiltrationTree from_parents(const std::vector<long long>& parents);
  static FiltrationTree uniform(std::size_t depth, std::size_t branching);

  std::size_t horizon() const noexcept { return horizon_; }
  std::size_t nodes() const noexcept { return parent_.size(); }
  std::size_t root() const noexcept { return root_; }
  std::size_t outcomes() const noexcept { return leaves_.size(); }
  const std::vector<std::size_t>& leaves() const noexcept { return leaves_; }
  const std::vector<std::size_t>& children(std::size_t node) const { return children_.at(node); }
  std::size_t depth_of(std::size_t node) const { return depth_.at(node); }
  std::size_t max_branching() const noexcept;
  /// Node at depth t on the path from the root to outcome x.
  std::size_t ancestor(std::size_t x, std::size_t t) const { return ancestors_.at(x).at(t); }

  /// Number of adapted stopping times, saturating at SIZE_MAX.
  std::size_t count_stopping_times() const;
  /// Every adapted stopping time as tau[x] in [0, T]. Refuses counts above `cap`.
  std::vector<std::vector<std::size_t>> stopping_times(std::size_t cap = Caps{}.max_stopping_times) const;

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::vector<std::size_t>> children_;
  std::vector<std::size_t> depth_;
  std::vector<std::size_t> leaves_;
  std::vector<std::vector<std::size_t>> ancestors_;
  std::size_t root_ = 0;
  std::size_t horizon_ = 0;
};

/// Evidence process e_t(H | x), t = 0..T, adapted to a filtration tree.
class EProcess {
 public:
  /// steps[t] is a kernel over the tree's outcomes. Throws NotAdapted when
  /// e_t differs between two outcomes sharing their depth-t node.
  EProcess(FiltrationTree tree, std::vector<EKernel> steps);

  const FiltrationTree& tree() const noexcept { return tree_; }
  std::size_t horizon() const noexcept { return tree_.horizon(); }
  const EKernel& step(std::size_t t) const { return steps_.at(t); }
  const std::vector<EKernel>& steps() const noexcept { return steps_; }
  EClass class_of() const noexcept;

  /// e_tau(H | x) = e_{tau(x)}(H | x).
  EKernel stopped(const std::vector<std::size_t>& tau) const;

 private:
  FiltrationTree tree_;
  std::vector<EKernel> steps_;
};

struct AnytimeWitness {
  std::vector<std::size_t> tau;
  ValidityEntry entry;
};

struct AnytimeReport {
  std::size_t stopping_times_checked = 0;
  bool anytime_valid = true;
  std::optional<AnytimeWitness> witness;
};

/// Enumerates every adapted stopping time and checks the stopped kernel.
/// Throws CapExceeded past the depth, branching or count caps.
AnytimeReport check_anytime_validity(const EProcess& proc, const ProbabilityAssignment& pa,
                                     const HypothesisClass& cls, const Caps& caps = {});

/// Per-step fast closure. Requires a capacity-valued process.
EProcess close_process(const EProcess& proc, const HypothesisSpace& space);

}  // namespace emeasure
