#pragma once

#include <cstddef>
#include <cstdint>

#include "kgq/kg_store.hpp"

namespace kgq {

/// Community-structured random graph: entities fall into communities of
/// uneven size and each relation maps every community to one target
/// community, so edges are predictable from community membership. Heads and
/// tails are drawn by Zipf-like entity popularity and relations by Zipf-like
/// frequency, giving the skewed degrees of real knowledge graphs.
struct SyntheticSpec {
  std::size_t entities = 1000;
  std::size_t relations = 20;
  std::size_t edges = 10000;
  std::size_t communities = 20;
  std::uint64_t seed = 1;
  double popularity_skew = 1.0;  // exponent over random entity ranks, 0 = uniform
  double relation_skew = 1.0;    // exponent over relation index, 0 = uniform
};

/// Entities are named e0000..., relations r00...; exactly `spec.edges`
/// distinct triples (argument error if the spec cannot hold that many).
KnowledgeGraph synthetic_graph(const SyntheticSpec& spec);

/// Random split: `train_fraction` of the edges form the train graph and the
/// full graph keeps all of them. Both share g's vocabulary.
GraphPair split_graph(const KnowledgeGraph& g, double train_fraction, std::uint64_t seed);

}  // namespace kgq
