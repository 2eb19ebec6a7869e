#pragma once

#include <vector>

#include "kgq/kg_store.hpp"
#include "kgq/plan.hpp"
#include "kgq/query.hpp"

namespace kgq {

/// Sorted, duplicate-free entity ids.
using AnswerSet = std::vector<EntityId>;

enum class CqStrategy {
  automatic,     // semi-join passes for tree-like queries, backtracking otherwise
  backtracking,  // always the generic join
};

/// Exact answers q(G) of a pure CQ. Constants and relations must resolve in g
/// (binding error otherwise).
AnswerSet evaluate_cq(const ConjunctiveQuery& q, const KnowledgeGraph& g,
                      CqStrategy strategy = CqStrategy::automatic);

/// Crisp bottom-up evaluation of a plan: projection is the relational image,
/// intersection/union are set operations, negation is the complement in E.
AnswerSet evaluate_plan(const ExecutionPlan& plan, const KnowledgeGraph& g);
AnswerSet evaluate_plan(const ConjunctiveQuery& q, const KnowledgeGraph& g);

/// evaluate_cq for pure queries, evaluate_plan for unions and negations.
AnswerSet evaluate(const ConjunctiveQuery& q, const KnowledgeGraph& g);

}  // namespace kgq
