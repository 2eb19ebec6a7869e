#include "kgq/plan.hpp"

#include <algorithm>

#include "kgq/error.hpp"

namespace kgq {

std::size_t ExecutionPlan::num_projections() const {
  return static_cast<std::size_t>(std::count_if(
      nodes.begin(), nodes.end(), [](const PlanNode& n) { return n.op == PlanOp::projection; }));
}

namespace {

void render(const ExecutionPlan& p, std::size_t i, const Vocabulary& vocab, std::string& out) {
  const auto& n = p.nodes[i];
  auto children = [&] {
    for (std::size_t k = 0; k < n.children.size(); ++k) {
      if (k) out += ",";
      render(p, n.children[k], vocab, out);
    }
  };
  switch (n.op) {
    case PlanOp::anchor:
      out += "Anchor(" + vocab.entities.name(n.entity) + ")";
      return;
    case PlanOp::existential:
      out += "Exists";
      return;
    case PlanOp::projection:
      out += "Projection(" + vocab.relations.name(n.relation) + "," +
             std::string(to_string(n.dir)) + ",";
      break;
    case PlanOp::intersection:
      out += "Intersection(";
      break;
    case PlanOp::disjunction:
      out += "Union(";
      break;
    case PlanOp::negation:
      out += "Negation(";
      break;
  }
  children();
  out += ")";
}

class Compiler {
 public:
  Compiler(const Vocabulary& vocab, ExecutionPlan& plan) : vocab_(vocab), plan_(plan) {}

  std::size_t branch(const std::vector<Atom>& atoms, const std::string& target) {
    auto shape = classify_branch(atoms, target);
    if (!shape.is_tree_like) {
      fail(ErrorKind::unsupported_shape,
           "query is cyclic; compile one of its unravelings instead");
    }
    atoms_ = &atoms;
    graph_ = build_query_graph_unchecked(atoms, target);
    incidence_ = graph_.incidence();
    return node(QueryGraph::root, graph_.edges.size());
  }

 private:
  std::size_t emit(PlanNode n) {
    plan_.nodes.push_back(std::move(n));
    return plan_.nodes.size() - 1;
  }

  std::size_t node(std::size_t n, std::size_t parent_edge) {
    std::vector<std::size_t> parts;
    bool any_positive = false;
    bool any_negated = false;
    for (auto e : incidence_[n]) {
      if (e == parent_edge) continue;
      const auto& edge = graph_.edges[e];
      const Atom& atom = (*atoms_)[edge.atom];
      const bool child_is_subject = edge.to == n;
      const auto child = child_is_subject ? edge.from : edge.to;
      auto sub = node(child, e);
      PlanNode proj;
      proj.op = PlanOp::projection;
      proj.relation = relation(atom.relation);
      proj.dir = child_is_subject ? Direction::fwd : Direction::bwd;
      proj.children = {sub};
      auto id = emit(std::move(proj));
      if (atom.negated) {
        any_negated = true;
        id = emit({PlanOp::negation, 0, 0, Direction::fwd, {id}});
      } else {
        any_positive = true;
      }
      parts.push_back(id);
    }
    if (any_negated && !any_positive) {
      fail(ErrorKind::unsupported_shape,
           "a negated branch must be intersected with at least one positive branch");
    }
    if (parts.empty()) {
      const Term& t = graph_.nodes[n].term;
      if (t.is_const()) {
        auto id = vocab_.entities.find(t.name);
        if (!id) fail(ErrorKind::binding, "unknown entity '" + t.name + "'");
        return emit({PlanOp::anchor, *id, 0, Direction::fwd, {}});
      }
      return emit({PlanOp::existential, 0, 0, Direction::fwd, {}});
    }
    if (parts.size() == 1) return parts.front();
    return emit({PlanOp::intersection, 0, 0, Direction::fwd, std::move(parts)});
  }

  RelationId relation(const std::string& name) const {
    auto id = vocab_.relations.find(name);
    if (!id) fail(ErrorKind::binding, "unknown relation '" + name + "'");
    return *id;
  }

  const Vocabulary& vocab_;
  ExecutionPlan& plan_;
  const std::vector<Atom>* atoms_ = nullptr;
  QueryGraph graph_;
  std::vector<std::vector<std::size_t>> incidence_;
};

}  // namespace

std::string ExecutionPlan::to_string(const Vocabulary& vocab) const {
  std::string out;
  if (!nodes.empty()) render(*this, root(), vocab, out);
  return out;
}

ExecutionPlan compile_plan(const ConjunctiveQuery& q, const Vocabulary& vocab) {
  ExecutionPlan plan;
  Compiler compiler(vocab, plan);
  std::vector<std::size_t> roots;
  for (const auto& b : q.branches) roots.push_back(compiler.branch(b, q.target));
  if (roots.size() > 1) {
    plan.nodes.push_back({PlanOp::disjunction, 0, 0, Direction::fwd, std::move(roots)});
  }
  return plan;
}

}  // namespace kgq
