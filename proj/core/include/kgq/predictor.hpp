#pragma once

#include <cstddef>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "kgq/kg_store.hpp"

namespace kgq {

/// Scores candidate edges with values in [0,1]. Implementations must be safe
/// for concurrent const use.
class LinkPredictor {
 public:
  virtual ~LinkPredictor() = default;

  virtual std::size_t num_entities() const = 0;
  virtual std::size_t num_relations() const = 0;

  virtual double score(RelationId rel, EntityId head, EntityId tail) const = 0;

  /// Scores of (head, rel, t) for every tail t. The result either aliases
  /// internal storage or `scratch`.
  virtual std::span<const float> row(RelationId rel, EntityId head,
                                     std::vector<float>& scratch) const;

  /// Non-null for {0,1}-valued predictors backed by a graph; lets executors
  /// walk adjacency lists instead of dense rows.
  virtual const KnowledgeGraph* crisp_graph() const { return nullptr; }

 protected:
  void check_relation(RelationId rel) const;
};

/// score = 1 iff the triple is in the graph.
class CrispPredictor final : public LinkPredictor {
 public:
  explicit CrispPredictor(const KnowledgeGraph& g) : g_(g) {}

  std::size_t num_entities() const override { return g_.num_entities(); }
  std::size_t num_relations() const override { return g_.num_relations(); }
  double score(RelationId rel, EntityId head, EntityId tail) const override;
  std::span<const float> row(RelationId rel, EntityId head,
                             std::vector<float>& scratch) const override;
  const KnowledgeGraph* crisp_graph() const override { return &g_; }

 private:
  const KnowledgeGraph& g_;
};

/// Materializes full |E| x |E| score matrices per relation on first use, as
/// long as the total stays within `max_bytes`. Relations past the budget are
/// forwarded to the wrapped predictor.
class ScoreCache final : public LinkPredictor {
 public:
  explicit ScoreCache(const LinkPredictor& inner, std::size_t max_bytes = std::size_t{1} << 30);

  std::size_t num_entities() const override { return inner_.num_entities(); }
  std::size_t num_relations() const override { return inner_.num_relations(); }
  double score(RelationId rel, EntityId head, EntityId tail) const override;
  std::span<const float> row(RelationId rel, EntityId head,
                             std::vector<float>& scratch) const override;
  const KnowledgeGraph* crisp_graph() const override { return inner_.crisp_graph(); }

 private:
  const std::vector<float>* matrix(RelationId rel) const;

  const LinkPredictor& inner_;
  std::size_t cached_relations_;
  mutable std::vector<std::unique_ptr<std::once_flag>> once_;
  mutable std::vector<std::vector<float>> matrices_;
};

}  // namespace kgq
