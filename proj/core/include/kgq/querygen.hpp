#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "kgq/kg_store.hpp"
#include "kgq/query.hpp"
#include "kgq/symbolic_eval.hpp"
#include "kgq/unraveling.hpp"

namespace kgq {

enum class QueryType {
  p1, p2, p3, i2, i3, ip, pi, in2, in3, inp, pin, pni, u2, up,
  double_path, triangle, square,
};

/// "1p", "2in", "triangle", ...
std::string_view to_string(QueryType t);
/// Throws usage errors for unknown names.
QueryType parse_query_type(std::string_view name);

/// The 14 operator types, in canonical order.
std::span<const QueryType> workload_types();
std::span<const QueryType> cyclic_types();
bool has_negation(QueryType t);
bool is_union(QueryType t);

struct LabeledQuery {
  ConjunctiveQuery query;
  QueryType type = QueryType::p1;
  AnswerSet easy;  // answers on the train graph that also hold on the full graph
  AnswerSet hard;  // answers on the full graph only

  /// easy ∪ hard, sorted.
  AnswerSet all_answers() const;
};

struct GenOptions {
  std::size_t count = 1;
  std::uint64_t seed = 13;
  /// Replace anchors by fresh existential variables.
  bool unanchored = false;
  /// With `unanchored`, replace a random non-empty subset instead of all.
  bool unanchor_subset = false;
  /// Reject queries without hard answers (test workloads).
  bool require_hard = true;
  std::size_t max_attempts = 10000;
  std::size_t workers = 1;
};

/// Samples `opts.count` queries of shape `type` grounded on `full`, labeled
/// against both graphs. Query i draws from a seed derived from (seed, type,
/// i), so the output is independent of `opts.workers`. Throws exhaustion
/// errors when a query cannot be instantiated within max_attempts.
std::vector<LabeledQuery> generate(QueryType type, const KnowledgeGraph& train,
                                   const KnowledgeGraph& full, const GenOptions& opts);

struct UnraveledQuery {
  LabeledQuery labeled;  // query replaced by its unraveling, labels kept
  nlohmann::json provenance;
};

/// Per depth (outer index follows `depths`), the unravelings of every query
/// in `batch`. Labels are those of the original queries.
std::vector<std::vector<UnraveledQuery>> unravel_workload(std::span<const LabeledQuery> batch,
                                                          std::span<const int> depths,
                                                          const UnravelOptions& opts = {});

/// queries.jsonl holds one query document per line; answers.jsonl holds
/// {"id", "type", "easy", "hard"} with entity names, in the same order.
void write_workload(const std::filesystem::path& dir, std::span<const LabeledQuery> batch,
                    const KnowledgeGraph& g);
std::vector<LabeledQuery> read_workload(const std::filesystem::path& queries,
                                        const std::filesystem::path& answers,
                                        const KnowledgeGraph& g);

}  // namespace kgq
