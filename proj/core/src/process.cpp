#include "emeasure/process.hpp"

#include <algorithm>
#include <limits>

#include "emeasure/errors.hpp"

namespace emeasure {

namespace {

constexpr std::size_t kSaturated = std::numeric_limits<std::size_t>::max();

std::size_t sat_mul(std::size_t a, std::size_t b) {
  if (a != 0 && b > kSaturated / a) return kSaturated;
  return a * b;
}

std::size_t sat_add(std::size_t a, std::size_t b) { return a > kSaturated - b ? kSaturated : a + b; }

}  // namespace

FiltrationTree FiltrationTree::from_parents(const std::vector<long long>& parents) {
  if (parents.empty()) throw Error(ErrorCode::InvalidArgument, "tree without nodes");
  FiltrationTree t;
  const std::size_t n = parents.size();
  t.parent_.assign(n, 0);
  t.children_.assign(n, {});
  std::optional<std::size_t> root;
  for (std::size_t i = 0; i < n; ++i) {
    if (parents[i] < 0) {
      if (root) throw Error(ErrorCode::InvalidArgument, "tree has more than one root");
      root = i;
      t.parent_[i] = i;
      continue;
    }
    const auto p = static_cast<std::size_t>(parents[i]);
    if (p >= n || p == i) throw Error(ErrorCode::InvalidArgument, "bad parent for node " + std::to_string(i));
    t.parent_[i] = p;
    t.children_[p].push_back(i);
  }
  if (!root) throw Error(ErrorCode::InvalidArgument, "tree has no root");
  t.root_ = *root;

  t.depth_.assign(n, kSaturated);
  std::vector<std::size_t> stack{t.root_};
  t.depth_[t.root_] = 0;
  std::size_t seen = 0;
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    ++seen;
    for (std::size_t c : t.children_[v]) {
      t.depth_[c] = t.depth_[v] + 1;
      stack.push_back(c);
    }
  }
  if (seen != n) throw Error(ErrorCode::InvalidArgument, "tree is not connected");

  for (std::size_t i = 0; i < n; ++i) {
    if (t.children_[i].empty()) t.leaves_.push_back(i);
  }
  t.horizon_ = t.depth_[t.leaves_.front()];
  for (std::size_t l : t.leaves_) {
    if (t.depth_[l] != t.horizon_) {
      throw Error(ErrorCode::InvalidArgument, "every leaf must sit at the horizon depth " +
                                                  std::to_string(t.horizon_));
    }
    std::vector<std::size_t> path(t.horizon_ + 1);
    for (std::size_t v = l;; v = t.parent_[v]) {
      path[t.depth_[v]] = v;
      if (v == t.root_) break;
    }
    t.ancestors_.push_back(std::move(path));
  }
  return t;
}

FiltrationTree FiltrationTree::uniform(std::size_t depth, std::size_t branching) {
  if (branching == 0) throw Error(ErrorCode::InvalidArgument, "branching must be positive");
  std::vector<long long> parents{-1};
  std::vector<std::size_t> frontier{0};
  for (std::size_t d = 0; d < depth; ++d) {
    std::vector<std::size_t> next;
    for (std::size_t v : frontier) {
      for (std::size_t b = 0; b < branching; ++b) {
        next.push_back(parents.size());
        parents.push_back(static_cast<long long>(v));
      }
    }
    frontier = std::move(next);
  }
  return from_parents(parents);
}

std::size_t FiltrationTree::max_branching() const noexcept {
  std::size_t b = 0;
  for (const auto& c : children_) b = std::max(b, c.size());
  return b;
}

std::size_t FiltrationTree::count_stopping_times() const {
  // Stop at v, or defer to every child independently.
  std::vector<std::size_t> order(nodes());
  for (std::size_t i = 0; i < nodes(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return depth_[a] > depth_[b]; });
  std::vector<std::size_t> f(nodes(), 1);
  for (std::size_t v : order) {
    if (children_[v].empty()) continue;
    std::size_t prod = 1;
    for (std::size_t c : children_[v]) prod = sat_mul(prod, f[c]);
    f[v] = sat_add(1, prod);
  }
  return f[root_];
}

std::vector<std::vector<std::size_t>> FiltrationTree::stopping_times(std::size_t cap) const {
  const std::size_t count = count_stopping_times();
  if (count > cap) {
    throw Error(ErrorCode::CapExceeded, "tree admits " + (count == kSaturated ? std::string("too many")
                                                                                : std::to_string(count)) +
                                            " stopping times (cap " + std::to_string(cap) + ")");
  }
  std::vector<std::size_t> pos(nodes(), 0);
  for (std::size_t i = 0; i < leaves_.size(); ++i) pos[leaves_[i]] = i;

  // Each option assigns a stop time to every outcome; entries outside the
  // subtree are left untouched and filled by the other branches.
  auto rec = [&](auto&& self, std::size_t v) -> std::vector<std::vector<std::size_t>> {
    std::vector<std::size_t> under;
    std::vector<std::size_t> stack{v};
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      if (children_[u].empty()) under.push_back(pos[u]);
      for (std::size_t c : children_[u]) stack.push_back(c);
    }
    std::vector<std::size_t> stop_here(leaves_.size(), 0);
    for (std::size_t x : under) stop_here[x] = depth_[v];
    std::vector<std::vector<std::size_t>> out{stop_here};
    if (children_[v].empty()) return out;

    std::vector<std::vector<std::size_t>> combos{std::vector<std::size_t>(leaves_.size(), 0)};
    for (std::size_t c : children_[v]) {
      const auto sub = self(self, c);
      std::vector<std::size_t> sub_leaves;
      std::vector<std::size_t> st{c};
      while (!st.empty()) {
        const std::size_t u = st.back();
        st.pop_back();
        if (children_[u].empty()) sub_leaves.push_back(pos[u]);
        for (std::size_t w : children_[u]) st.push_back(w);
      }
      std::vector<std::vector<std::size_t>> next;
      next.reserve(combos.size() * sub.size());
      for (const auto& base : combos) {
        for (const auto& s : sub) {
          auto merged = base;
          for (std::size_t x : sub_leaves) merged[x] = s[x];
          next.push_back(std::move(merged));
        }
      }
      combos = std::move(next);
    }
    out.insert(out.end(), combos.begin(), combos.end());
    return out;
  };
  return rec(rec, root_);
}

EProcess::EProcess(FiltrationTree tree, std::vector<EKernel> steps) : tree_(std::move(tree)), steps_(std::move(steps)) {
  if (steps_.size() != tree_.horizon() + 1) {
    throw Error(ErrorCode::InvalidArgument, "process needs " + std::to_string(tree_.horizon() + 1) +
                                                " steps, got " + std::to_string(steps_.size()));
  }
  for (std::size_t t = 0; t < steps_.size(); ++t) {
    const auto& k = steps_[t];
    if (k.outcomes() != tree_.outcomes() || k.hypotheses() != steps_.front().hypotheses()) {
      throw Error(ErrorCode::WidthMismatch, "step " + std::to_string(t) + " does not match the tree outcomes");
    }
    for (std::size_t x = 1; x < tree_.outcomes(); ++x) {
      for (std::size_t y = 0; y < x; ++y) {
        if (tree_.ancestor(x, t) == tree_.ancestor(y, t) && !(k.column(x) == k.column(y))) {
          throw Error(ErrorCode::NotAdapted, "step " + std::to_string(t) + " separates outcomes " +
                                                 std::to_string(y) + " and " + std::to_string(x) +
                                                 " before the tree does");
        }
      }
    }
  }
}

EClass EProcess::class_of() const noexcept {
  EClass c = EClass::Measure;
  for (const auto& k : steps_) c = std::min(c, k.class_of());
  return c;
}

EKernel EProcess::stopped(const std::vector<std::size_t>& tau) const {
  if (tau.size() != tree_.outcomes()) throw Error(ErrorCode::WidthMismatch, "stopping time has wrong length");
  std::vector<EFunction> cols;
  cols.reserve(tau.size());
  for (std::size_t x = 0; x < tau.size(); ++x) cols.push_back(steps_.at(tau[x]).column(x));
  return EKernel::from_columns(std::move(cols));
}

AnytimeReport check_anytime_validity(const EProcess& proc, const ProbabilityAssignment& pa,
                                     const HypothesisClass& cls, const Caps& caps) {
  const auto& tree = proc.tree();
  if (tree.horizon() > caps.max_tree_depth) {
    throw Error(ErrorCode::CapExceeded, "tree depth " + std::to_string(tree.horizon()) + " exceeds cap " +
                                            std::to_string(caps.max_tree_depth));
  }
  if (tree.max_branching() > caps.max_tree_branching) {
    throw Error(ErrorCode::CapExceeded, "tree branching " + std::to_string(tree.max_branching()) +
                                            " exceeds cap " + std::to_string(caps.max_tree_branching));
  }
  AnytimeReport r;
  for (const auto& tau : tree.stopping_times(caps.max_stopping_times)) {
    ++r.stopping_times_checked;
    const auto v = check_validity(proc.stopped(tau), pa, cls);
    if (!v.valid) {
      r.anytime_valid = false;
      if (!r.witness) r.witness = AnytimeWitness{tau, *v.first_violation()};
    }
  }
  return r;
}

EProcess close_process(const EProcess& proc, const HypothesisSpace& space) {
  std::vector<EKernel> steps;
  steps.reserve(proc.steps().size());
  for (const auto& k : proc.steps()) steps.push_back(close_kernel(k, space));
  return EProcess(proc.tree(), std::move(steps));
}

}  // namespace emeasure
