#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "kgq/plan.hpp"
#include "kgq/predictor.hpp"

namespace kgq {

/// Soft membership over all entities, indexed by entity id, values in [0,1].
using FuzzyEntitySet = std::vector<double>;

enum class ProjectionMode { max_product, noisy_or };
enum class ConjunctionMode { product, min };
enum class DisjunctionMode { prob_sum, max };

struct FuzzyConfig {
  ProjectionMode projection = ProjectionMode::max_product;
  ConjunctionMode conjunction = ConjunctionMode::product;
  DisjunctionMode disjunction = DisjunctionMode::prob_sum;
  double count_threshold = 0.5;

  /// Throws argument errors unless count_threshold lies in (0,1).
  void validate() const;
  nlohmann::json to_json() const;
};

ProjectionMode parse_projection_mode(std::string_view s);
ConjunctionMode parse_conjunction_mode(std::string_view s);
DisjunctionMode parse_disjunction_mode(std::string_view s);

struct ExecTrace {
  /// Components pulled back into [0,1] by the final clamp of an operator.
  std::size_t clamped = 0;
};

/// Bottom-up execution: anchors are one-hot, existential leaves all-ones,
/// projections aggregate v[a] * P(a, b) over a (max or noisy-or), and
/// intersection/union/negation are the configured t-norm, t-conorm and 1 - v.
/// Predictors exposing crisp_graph() are walked sparsely.
FuzzyEntitySet execute(const ExecutionPlan& plan, const LinkPredictor& predictor,
                       const FuzzyConfig& cfg = {}, ExecTrace* trace = nullptr);

/// Number of components >= cfg.count_threshold.
std::size_t predicted_cardinality(const FuzzyEntitySet& v, const FuzzyConfig& cfg = {});

}  // namespace kgq
