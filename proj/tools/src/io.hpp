#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "emeasure/decisions.hpp"
#include "emeasure/evidence.hpp"
#include "emeasure/hypothesis_space.hpp"
#include "emeasure/kernels.hpp"
#include "emeasure/process.hpp"

namespace emeasure::cli {

/// Where a value came from, for error messages: "kernel file 'k.yaml'".
struct Source {
  std::string what;
  std::string path;
  std::string at(const std::string& field) const;
};

/// Loads a YAML document; syntax errors carry line and column.
YAML::Node load_yaml(const std::string& path, const std::string& what);

/// "points=24,members=16,powerset=16,depth=4,branching=3,stopping=100000,family=20"; unknown keys are errors.
Caps parse_caps(const std::string& text, Caps base = {});

XValue parse_value(const YAML::Node& node, const Source& src, const std::string& field);
Rational parse_mass(const YAML::Node& node, const Source& src, const std::string& field);

/// points + generators | preorder.
HypothesisSpace parse_space(const YAML::Node& doc, const Source& src, const Caps& caps);

/// "{P1,P2}", "P1,P2" or "{}".
PointSet parse_hypothesis(const std::string& label, const Model& model, const Source& src, const std::string& field);

/// {hypothesis: value}. The empty hypothesis defaults to inf; every other
/// member must be present.
EFunction parse_evidence_map(const YAML::Node& node, const HypothesisSpace& space, const Source& src,
                             const std::string& field);

struct ModelFile {
  SampleSpace outcomes;
  std::vector<std::string> labels;  ///< one per distribution, in assignment order
  ProbabilityAssignment pa;
};

/// `outcomes: [..]` (optional) and `pmf: {label: {outcome: mass}}`. When
/// `order` is given the distributions follow it and must match it exactly.
ModelFile parse_model(const YAML::Node& doc, const Source& src, const std::vector<std::string>* order = nullptr);

/// `kernel: {hypothesis: {outcome: value}}` or `likelihood: {outcome: mass}`.
EKernel parse_kernel(const YAML::Node& doc, const HypothesisSpace& space, const SampleSpace& outcomes,
                     const ProbabilityAssignment* pa, const Source& src);

/// `process: {parents: [..], steps: [{hypothesis: {outcome: value}}, ..]}`;
/// the tree's leaves are the outcomes in ascending node order.
EProcess parse_process(const YAML::Node& doc, const HypothesisSpace& space, const SampleSpace& outcomes,
                       const Source& src);

struct DecisionFile {
  std::vector<std::string> points;
  std::variant<ConsequenceTable, NumericLoss> problem;
  bool numeric() const { return std::holds_alternative<NumericLoss>(problem); }
  ConsequenceTable table() const;
};

/// `decisions`, `consequences: {elements, order-pairs}` with `table`, or
/// numeric `loss`, or `loss: chi-square` (needs the model).
DecisionFile parse_decisions(const YAML::Node& doc, const Source& src, const std::vector<std::string>& points,
                             const ProbabilityAssignment* pa);

}  // namespace emeasure::cli
