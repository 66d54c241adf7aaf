#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "emeasure/evidence.hpp"

namespace emeasure {

/// Ordered, uniquely labelled outcomes of the finite sample space.
class SampleSpace {
 public:
  explicit SampleSpace(std::vector<std::string> labels);
  static SampleSpace indexed(std::size_t size, const std::string& prefix = "x");

  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  std::optional<std::size_t> find(const std::string& label) const;

 private:
  std::vector<std::string> labels_;
};

/// Probability mass function; masses are non-negative and sum exactly to 1.
class Pmf {
 public:
  explicit Pmf(std::vector<Rational> mass);
  static Pmf uniform(std::size_t outcomes);

  std::size_t size() const noexcept { return mass_.size(); }
  const Rational& operator[](std::size_t x) const { return mass_.at(x); }
  const std::vector<Rational>& masses() const noexcept { return mass_; }

  /// Exact sum_x P(x) v(x) with 0 * inf = 0.
  XValue expectation(std::span<const XValue> values) const;

 private:
  std::vector<Rational> mass_;
};

/// One distribution per model point, all over the same outcomes.
class ProbabilityAssignment {
 public:
  explicit ProbabilityAssignment(std::vector<Pmf> per_point);

  std::size_t points() const noexcept { return pmfs_.size(); }
  std::size_t outcomes() const noexcept { return pmfs_.front().size(); }
  const Pmf& operator[](std::size_t point) const { return pmfs_.at(point); }

 private:
  std::vector<Pmf> pmfs_;
};

/// Data-indexed evidence: one E-function column per outcome.
class EKernel {
 public:
  static EKernel from_columns(std::vector<EFunction> columns);
  /// table[x][H]; each column is classified against `cls`.
  static EKernel classify(const std::vector<std::vector<XValue>>& table, const HypothesisClass& cls);

  std::size_t outcomes() const noexcept { return columns_.size(); }
  std::size_t hypotheses() const noexcept { return columns_.front().size(); }
  const EFunction& column(std::size_t x) const { return columns_.at(x); }
  const std::vector<EFunction>& columns() const noexcept { return columns_; }
  const XValue& operator()(HypId h, std::size_t x) const { return columns_.at(x)[h]; }
  /// x -> e(H | x).
  std::vector<XValue> variable(HypId h) const;
  /// Weakest class over all columns.
  EClass class_of() const noexcept { return class_; }
  bool at_least(EClass c) const noexcept { return class_ >= c; }

  friend bool operator==(const EKernel& a, const EKernel& b) { return a.columns_ == b.columns_; }

 private:
  std::vector<EFunction> columns_;
  EClass class_ = EClass::Measure;
};

/// Inverse-likelihood kernel: e(H | x) = min_{P in H} lambda(x) / P(x).
EKernel likelihood_kernel(const HypothesisClass& cls, const ProbabilityAssignment& pa, const Pmf& lambda);

/// Constant value c on every nonempty hypothesis.
EKernel constant_kernel(const HypothesisClass& cls, std::size_t outcomes, const XValue& c);

struct ValidityEntry {
  HypId hypothesis{};
  std::size_t point = 0;
  XValue expectation;
  bool ok = false;
};

struct ValidityReport {
  std::vector<ValidityEntry> entries;
  bool valid = true;
  std::optional<ValidityEntry> first_violation() const;
};

/// E^P[e(H | X)] <= 1 for every nonempty H and every P in H, exactly.
ValidityReport check_validity(const EKernel& k, const ProbabilityAssignment& pa, const HypothesisClass& cls);

/// Column-wise fast closure.
EKernel close_kernel(const EKernel& k, const HypothesisSpace& space);

EKernel merge_kernels(std::span<const EKernel> kernels, std::span<const Rational> weights,
                      const HypothesisClass& cls);

/// {H : e(H | x) < 1/alpha}; alpha in (0, 1].
std::vector<HypId> confidence_set(const EKernel& k, const Rational& alpha, std::size_t x);

/// Data-dependent level alpha~(H, x) in [0, inf].
using AlphaRule = std::function<XValue(HypId, std::size_t)>;

AlphaRule constant_rule(const Rational& alpha);
/// alpha~ = 1 / e(H | x), the tight rule.
AlphaRule canonical_rule(const EKernel& k);

struct PosthocReport {
  std::vector<ValidityEntry> entries;  ///< expectation = E^P[1{H not in C_a~} / a~]
  bool holds = true;
};

/// Per-outcome rejection indicator: e(H | x) >= 1 / alpha~(x).
PosthocReport check_posthoc_validity(const EKernel& k, const ProbabilityAssignment& pa,
                                     const HypothesisClass& cls, const AlphaRule& rule);

struct PosthocWitness {
  HypId hypothesis{};
  std::size_t point = 0;
  std::vector<XValue> levels;  ///< the violating rule, one level per outcome
  XValue statistic;
};

/// Searches every rule mapping outcomes into alpha_grid together with the
/// reciprocal evidence levels {1 / e(H | x)}. Returns the strongest violation
/// found, if any.
std::optional<PosthocWitness> search_posthoc_violation(const EKernel& k, const ProbabilityAssignment& pa,
                                                       const HypothesisClass& cls,
                                                       std::span<const Rational> alpha_grid);

struct PosteriorEntry {
  HypId hypothesis{};
  std::size_t point = 0;
  XValue expectation;
  XValue bound;
  bool ok = false;
};

struct PosteriorReport {
  bool kernel_valid = false;
  std::vector<PosteriorEntry> entries;
  bool holds = true;
};

struct Posterior {
  EKernel kernel;
  PosteriorReport report;
};

/// e2(H | x) = e0(H) e1(H | x); checks E^P[e2(H | X)] <= e0(H) for P in H.
Posterior eposterior_raw(const EFunction& prior, const EKernel& k, const ProbabilityAssignment& pa,
                         const HypothesisClass& cls);

/// Closure of the raw posterior; checks E^P[e2(H | X)] <= e0(H_P) for P in H.
Posterior eposterior_closed(const EFunction& prior, const EKernel& k, const ProbabilityAssignment& pa,
                            const HypothesisSpace& space);

struct PredictiveReport {
  std::vector<XValue> sup_true;    ///< sup_{H containing x} e(H | x)
  std::vector<XValue> least_true;  ///< e(H_x | x)
  bool sup_identity = true;
  std::vector<XValue> sup_expectation;    ///< per distribution
  std::vector<XValue> least_expectation;  ///< per distribution
  bool valid = true;        ///< via the supremum
  bool least_valid = true;  ///< via the single variable x -> e(H_x | x)
};

/// The hypothesis space is over the outcomes themselves; `pa` lists the
/// candidate distributions.
PredictiveReport check_predictive_validity(const EKernel& k, const ProbabilityAssignment& pa,
                                           const HypothesisSpace& space_over_outcomes);

struct Pushforward {
  EKernel kernel;
  /// entries: hypothesis is the target member G, point is the source P with
  /// f(P) in G.
  ValidityReport validity;
};

/// e_f(G | x) = e(f^-1(G) | x). Throws NotMeasurable if a preimage is not a
/// member of the source class.
Pushforward pushforward_kernel(const EKernel& k, const HypothesisClass& source, std::span<const std::size_t> f,
                               const HypothesisClass& target, const ProbabilityAssignment& pa);

}  // namespace emeasure
