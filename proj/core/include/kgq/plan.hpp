#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "kgq/kg_store.hpp"
#include "kgq/query.hpp"

namespace kgq {

enum class PlanOp : unsigned char { anchor, existential, projection, intersection, disjunction, negation };

struct PlanNode {
  PlanOp op = PlanOp::existential;
  EntityId entity = 0;       // anchor
  RelationId relation = 0;   // projection
  Direction dir = Direction::fwd;
  std::vector<std::size_t> children;
};

/// Operator tree stored in post-order: children precede parents and the root
/// is the last node.
struct ExecutionPlan {
  std::vector<PlanNode> nodes;

  std::size_t root() const { return nodes.size() - 1; }
  std::size_t num_projections() const;
  std::string to_string(const Vocabulary& vocab) const;
};

/// Bottom-up plan of a tree-like query (anchored or not); unions compile to a
/// disjunction over their branches.
///
/// A tree edge whose atom is crossed from subject to object on the way to the
/// root becomes a fwd projection, otherwise bwd. Constant leaves become
/// anchors and variable leaves existential leaves. A negated atom negates the
/// whole sub-branch below it, and must sit next to at least one positive
/// sibling at its join point (the 2in/3in/inp/pin/pni patterns). Cyclic
/// branches are rejected with unsupported_shape; unravel them first.
ExecutionPlan compile_plan(const ConjunctiveQuery& q, const Vocabulary& vocab);

}  // namespace kgq
