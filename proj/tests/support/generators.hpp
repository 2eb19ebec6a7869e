#pragma once

#include <string>
#include <vector>

#include "kgq/kg_store.hpp"
#include "kgq/query.hpp"
#include "kgq/random.hpp"
#include "kgq/unraveling.hpp"

namespace kgq::testing {

struct RandomCqSpec {
  int max_vars = 5;
  int max_atoms = 6;
  int max_constants = 2;  // distinct constants
  int relations = 3;      // relation names R0, R1, ...
  /// Constant names to draw from; defaults to c0, c1, ...
  std::vector<std::string> constant_pool;
};

std::string relation_name(int r);

/// Pure CQ with a connected ConOcc query graph. Self-loops, parallel atoms and
/// repeated constants all occur with positive probability.
ConjunctiveQuery random_cq(Rng& rng, const RandomCqSpec& spec = {});

/// random_cq() rejected until the query is cyclic.
ConjunctiveQuery random_cyclic_cq(Rng& rng, const RandomCqSpec& spec = {});

/// Entities e0.., relations R0..; `edges` distinct triples (fewer if the
/// graph cannot hold them).
KnowledgeGraph random_graph(Rng& rng, int entities, int relations, int edges);

/// Tree-like query of depth <= depth built by walking q from its target and
/// copying atoms with fresh variables, so q' -> q is a homomorphism by
/// construction. Walks may immediately re-cross an atom and may continue
/// below variables whose image is a constant unless `stop_at_constants`.
ConjunctiveQuery random_tree_into(Rng& rng, const ConjunctiveQuery& q, int depth,
                                  bool stop_at_constants = false);

/// Random walk of `length` steps from the target (immediate returns allowed).
QueryPath random_path(Rng& rng, const ConjunctiveQuery& q, int length);

}  // namespace kgq::testing
