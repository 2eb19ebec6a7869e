#include "kgq/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "kgq/error.hpp"
#include "kgq/random.hpp"

namespace kgq {

namespace {

std::string numbered(char prefix, std::size_t i, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%0*zu", prefix, width, i);
  return buf;
}

int digits(std::size_t n) {
  int d = 1;
  for (; n >= 10; n /= 10) ++d;
  return d;
}

// Draws index i with probability weight[i] / sum(weight).
class WeightedPicker {
 public:
  explicit WeightedPicker(const std::vector<double>& weight) : cumulative_(weight.size()) {
    double sum = 0;
    for (std::size_t i = 0; i < weight.size(); ++i) cumulative_[i] = sum += weight[i];
  }
  std::size_t operator()(Rng& rng) const {
    const double u = uniform01(rng) * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), cumulative_.size() - 1);
  }

 private:
  std::vector<double> cumulative_;
};

}  // namespace

KnowledgeGraph synthetic_graph(const SyntheticSpec& spec) {
  if (spec.entities == 0 || spec.relations == 0 || spec.communities == 0 ||
      spec.communities > spec.entities) {
    fail(ErrorKind::argument, "synthetic graph needs entities >= communities >= 1 and relations >= 1");
  }
  Rng rng(derive_seed(spec.seed, {0x5e7}));

  // Uneven community sizes: weights in [0.25, 4) on a log scale, at least one
  // member each.
  std::vector<double> weight(spec.communities);
  for (auto& w : weight) w = std::exp2(uniform(rng, -2.0, 2.0));
  std::vector<std::size_t> community(spec.entities);
  std::vector<std::vector<EntityId>> members(spec.communities);
  double total = 0;
  for (double w : weight) total += w;
  for (std::size_t e = 0; e < spec.entities; ++e) {
    std::size_t c = 0;
    if (e < spec.communities) {
      c = e;
    } else {
      double u = uniform(rng, 0.0, total);
      while (c + 1 < spec.communities && u >= weight[c]) u -= weight[c++];
    }
    community[e] = c;
    members[c].push_back(static_cast<EntityId>(e));
  }

  std::vector<std::vector<std::size_t>> target(spec.relations, std::vector<std::size_t>(spec.communities));
  for (auto& t : target) {
    for (auto& c : t) c = uniform_index(rng, spec.communities);
  }

  std::size_t capacity = 0;
  for (std::size_t r = 0; r < spec.relations; ++r) {
    for (std::size_t c = 0; c < spec.communities; ++c) capacity += members[c].size() * members[target[r][c]].size();
  }
  if (spec.edges > capacity / 2) fail(ErrorKind::argument, "synthetic graph too dense for its community layout");

  Vocabulary vocab;
  for (std::size_t e = 0; e < spec.entities; ++e) vocab.entities.intern(numbered('e', e, digits(spec.entities - 1)));
  for (std::size_t r = 0; r < spec.relations; ++r) vocab.relations.intern(numbered('r', r, std::max(2, digits(spec.relations - 1))));

  // Zipf-like skew: entity popularity by a random rank, relation frequency by
  // relation index.
  std::vector<std::size_t> rank(spec.entities);
  for (std::size_t e = 0; e < spec.entities; ++e) rank[e] = e;
  shuffle(rank, rng);
  std::vector<double> popularity(spec.entities);
  for (std::size_t e = 0; e < spec.entities; ++e) {
    popularity[e] = std::pow(static_cast<double>(rank[e] + 1), -spec.popularity_skew);
  }
  std::vector<double> relation_weight(spec.relations);
  for (std::size_t r = 0; r < spec.relations; ++r) {
    relation_weight[r] = std::pow(static_cast<double>(r + 1), -spec.relation_skew);
  }
  const WeightedPicker pick_relation(relation_weight);
  const WeightedPicker pick_head(popularity);
  std::vector<std::vector<double>> member_weights(spec.communities);
  std::vector<WeightedPicker> pick_member;
  for (std::size_t c = 0; c < spec.communities; ++c) {
    for (auto e : members[c]) member_weights[c].push_back(popularity[e]);
    pick_member.emplace_back(member_weights[c]);
  }

  std::set<Triple> edges;
  const std::size_t max_draws = 1000 * spec.edges + 1000;
  for (std::size_t draws = 0; edges.size() < spec.edges; ++draws) {
    if (draws == max_draws) fail(ErrorKind::argument, "synthetic graph too dense for its skew settings");
    const auto r = static_cast<RelationId>(pick_relation(rng));
    const auto h = static_cast<EntityId>(pick_head(rng));
    const auto c = target[r][community[h]];
    edges.insert({h, r, members[c][pick_member[c](rng)]});
  }
  return KnowledgeGraph::from_triples(std::move(vocab), {edges.begin(), edges.end()});
}

GraphPair split_graph(const KnowledgeGraph& g, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction <= 1.0)) {
    fail(ErrorKind::argument, "train fraction must lie in (0, 1]");
  }
  std::vector<Triple> edges(g.edges().begin(), g.edges().end());
  Rng rng(derive_seed(seed, {0x5971}));
  shuffle(edges, rng);
  const auto n_train = static_cast<std::size_t>(train_fraction * static_cast<double>(edges.size()));
  std::vector<Triple> train(edges.begin(), edges.begin() + static_cast<std::ptrdiff_t>(n_train));
  return {KnowledgeGraph::from_triples(g.vocabulary(), std::move(train)),
          KnowledgeGraph::from_triples(g.vocabulary(), std::move(edges))};
}

}  // namespace kgq
