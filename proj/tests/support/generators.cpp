#include "generators.hpp"

#include <algorithm>
#include <set>

namespace kgq::testing {

std::string relation_name(int r) { return "R" + std::to_string(r); }

ConjunctiveQuery random_cq(Rng& rng, const RandomCqSpec& spec) {
  const int nvars = 1 + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(spec.max_vars)));
  std::vector<std::string> vars{"x"};
  for (int i = 1; i < nvars; ++i) vars.push_back("v" + std::to_string(i));
  std::vector<std::string> pool = spec.constant_pool;
  if (pool.empty()) {
    for (int i = 0; i < spec.max_constants; ++i) pool.push_back("c" + std::to_string(i));
  }
  shuffle(pool, rng);
  const int ncons = std::min<int>(static_cast<int>(pool.size()),
                                  static_cast<int>(uniform_index(rng, spec.max_constants + 1)));

  auto rel = [&] { return relation_name(static_cast<int>(uniform_index(rng, spec.relations))); };
  auto var = [&](int i) { return Term::var(vars[i]); };
  std::vector<Atom> atoms;
  auto add = [&](Term a, Term b) {
    if (coin(rng)) std::swap(a, b);
    atoms.push_back({rel(), std::move(a), std::move(b), false});
  };
  // Spanning tree over the variables keeps the ConOcc graph connected.
  for (int i = 1; i < nvars; ++i) add(var(static_cast<int>(uniform_index(rng, i))), var(i));
  const int budget = std::max(nvars - 1, 1 + static_cast<int>(uniform_index(rng, spec.max_atoms)));
  while (static_cast<int>(atoms.size()) < std::min(budget, spec.max_atoms)) {
    const Term a = var(static_cast<int>(uniform_index(rng, nvars)));
    if (ncons > 0 && coin(rng)) {
      add(a, Term::constant(pool[uniform_index(rng, ncons)]));
    } else {
      add(a, var(static_cast<int>(uniform_index(rng, nvars))));
    }
  }
  shuffle(atoms, rng);
  return ConjunctiveQuery::make("x", std::move(atoms));
}

ConjunctiveQuery random_cyclic_cq(Rng& rng, const RandomCqSpec& spec) {
  for (;;) {
    auto q = random_cq(rng, spec);
    if (classify(q).is_cyclic) return q;
  }
}

KnowledgeGraph random_graph(Rng& rng, int entities, int relations, int edges) {
  Vocabulary vocab;
  for (int e = 0; e < entities; ++e) vocab.entities.intern("e" + std::to_string(e));
  for (int r = 0; r < relations; ++r) vocab.relations.intern(relation_name(r));
  const auto cap = static_cast<std::size_t>(entities) * entities * relations;
  const auto target = std::min<std::size_t>(static_cast<std::size_t>(edges), cap);
  std::set<Triple> triples;
  while (triples.size() < target) {
    triples.insert({static_cast<EntityId>(uniform_index(rng, entities)),
                    static_cast<RelationId>(uniform_index(rng, relations)),
                    static_cast<EntityId>(uniform_index(rng, entities))});
  }
  return KnowledgeGraph::from_triples(std::move(vocab), {triples.begin(), triples.end()});
}

namespace {

struct Move {
  std::size_t atom;
  bool forward;  // parent is the subject
  Term next;
};

std::vector<Move> moves_from(const std::vector<Atom>& atoms, const Term& at) {
  std::vector<Move> out;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (atoms[i].subject == at) out.push_back({i, true, atoms[i].object});
    if (atoms[i].object == at && !(atoms[i].subject == atoms[i].object)) {
      out.push_back({i, false, atoms[i].subject});
    }
  }
  return out;
}

}  // namespace

ConjunctiveQuery random_tree_into(Rng& rng, const ConjunctiveQuery& q, int depth,
                                  bool stop_at_constants) {
  const auto& atoms = q.atoms();
  std::vector<Atom> out;
  int fresh = 0;
  // Each q' node carries its image in q; constants of q' are leaves.
  auto grow = [&](auto& self, const Term& node, const Term& image, int level) -> void {
    if (level == depth) return;
    auto moves = moves_from(atoms, image);
    if (moves.empty()) return;
    // 0-2 children, at least one at the root.
    const auto children = level == 0 ? 1 + uniform_index(rng, 2) : uniform_index(rng, 3);
    for (std::uint64_t c = 0; c < children; ++c) {
      const auto& m = moves[uniform_index(rng, moves.size())];
      Term child;
      bool expand = true;
      if (m.next.is_const() && (stop_at_constants || coin(rng))) {
        child = m.next;
        expand = false;
      } else {
        child = Term::var("t" + std::to_string(++fresh));
      }
      const auto& rel = atoms[m.atom].relation;
      out.push_back(m.forward ? Atom{rel, node, child, false} : Atom{rel, child, node, false});
      if (expand) self(self, child, m.next, level + 1);
    }
  };
  grow(grow, Term::var(q.target), Term::var(q.target), 0);
  return ConjunctiveQuery::make(q.target, std::move(out));
}

QueryPath random_path(Rng& rng, const ConjunctiveQuery& q, int length) {
  QueryPath p{Term::var(q.target), {}};
  for (int i = 0; i < length; ++i) {
    auto moves = moves_from(q.atoms(), p.end());
    if (moves.empty()) break;
    const auto& m = moves[uniform_index(rng, moves.size())];
    p.steps.push_back({m.atom, m.forward ? Direction::fwd : Direction::bwd, m.next});
  }
  return p;
}

}  // namespace kgq::testing
