#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kgq/fuzzy_exec.hpp"
#include "kgq/metrics.hpp"
#include "kgq/predictor.hpp"
#include "kgq/querygen.hpp"
#include "kgq/unraveling.hpp"

namespace kgq {

struct EvalSettings {
  FuzzyConfig fuzzy;
  /// Unraveling depths applied to cyclic queries.
  std::vector<int> depths{3};
  MrrScope scope = MrrScope::hard_only;
  std::size_t workers = 1;
  UnravelOptions unravel;
};

/// Metrics of one pass over the workload. depth 0 means no query needed
/// unraveling and every query was executed as given.
struct DepthReport {
  int depth = 0;
  MetricsReport report;
  std::vector<QueryScore> scores;  // sorted by query id
};

/// Executes every query against the predictor. Cyclic pure queries are
/// replaced by their unraveling at each requested depth (one report per
/// depth); tree-like queries are executed directly and appear in every
/// report. Throws usage errors when cyclic queries meet an empty depth list.
std::vector<DepthReport> evaluate_workload(const KnowledgeGraph& g, const LinkPredictor& predictor,
                                           std::span<const LabeledQuery> queries,
                                           const EvalSettings& settings);

/// Scores one labeled query (already tree-like or a union/negation type).
QueryScore evaluate_query(const KnowledgeGraph& g, const LinkPredictor& predictor,
                          const LabeledQuery& q, const EvalSettings& settings);

/// depth,type,mrr,spearmanr,mape,hits1 with one row per (depth, type) plus
/// an "all" row per depth. Absent correlations are empty fields.
std::string sweep_csv(std::span<const DepthReport> reports);

/// Writes report.json/report.txt (depth 0) or report_d<depth>.json/.txt.
void write_reports(const std::filesystem::path& dir, std::span<const DepthReport> reports,
                   const std::string& dataset, const std::string& predictor,
                   const nlohmann::json& config);

}  // namespace kgq
