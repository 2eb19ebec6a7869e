#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kgq/fuzzy_exec.hpp"
#include "kgq/symbolic_eval.hpp"

namespace kgq {

/// Rank of `answer` among itself and all non-answers by descending score;
/// a tied block shares its average rank. Throws argument errors unless
/// `answer` is in `all_answers` (sorted).
double filtered_rank(const FuzzyEntitySet& scores, EntityId answer, const AnswerSet& all_answers);

enum class MrrScope { hard_only, all };

struct QueryEvalRecord {
  std::string id;
  std::string type;
  FuzzyEntitySet scores;
  AnswerSet easy;
  AnswerSet hard;
  std::size_t predicted_count = 0;
  std::size_t true_count = 0;  // |easy ∪ hard|
};

/// Per-query reductions of a record; everything the report needs.
struct QueryScore {
  std::string id;
  std::string type;
  double reciprocal_rank = 0;  // mean of 1/rank over in-scope answers
  double hits1 = 0, hits3 = 0, hits10 = 0;
  std::size_t predicted_count = 0;
  std::size_t true_count = 0;
};

/// Throws argument errors when the scope has no answers.
QueryScore summarize(const QueryEvalRecord& r, MrrScope scope = MrrScope::hard_only);

/// Mean over queries of the mean reciprocal filtered rank of their answers.
double mrr(std::span<const QueryEvalRecord> records, MrrScope scope = MrrScope::hard_only);
/// Mean over queries of the fraction of in-scope answers ranked <= k.
double hits_at(std::span<const QueryEvalRecord> records, double k,
               MrrScope scope = MrrScope::hard_only);

/// Pearson correlation of average-tie ranks. Absent when either side is
/// constant; argument error on length mismatch or fewer than two pairs.
std::optional<double> spearman(std::span<const double> pred, std::span<const double> truth);

/// Mean of |pred - true| / true. Throws argument errors on zero true counts.
double mape(std::span<const double> pred, std::span<const double> truth);

/// Average ranks (1-based) with ties sharing their mean rank.
std::vector<double> average_ranks(std::span<const double> values);

struct TypeMetrics {
  double mrr = 0, hits1 = 0, hits3 = 0, hits10 = 0, mape = 0;
  std::optional<double> spearmanr;
  std::size_t n = 0;
};

struct MetricsReport {
  std::map<std::string, TypeMetrics> per_type;
  TypeMetrics aggregate;
};

/// Scores are sorted by id first so the report is independent of the order
/// records were produced in.
MetricsReport build_report(std::vector<QueryScore> scores);

/// {dataset, predictor, config, per_type: {type: {...}}, aggregate: {...}}
nlohmann::json report_to_json(const MetricsReport& r, const std::string& dataset,
                              const std::string& predictor, const nlohmann::json& config);
nlohmann::json type_metrics_to_json(const TypeMetrics& m);
/// One row per type plus an "all" row, columns aligned.
std::string report_to_text(const MetricsReport& r);

}  // namespace kgq
