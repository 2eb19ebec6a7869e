#include "kgq/symbolic_eval.hpp"

#include <algorithm>
#include <limits>
#include <unordered_map>

#include "kgq/error.hpp"

namespace kgq {

namespace {

using Bitmap = std::vector<char>;

AnswerSet to_answers(const Bitmap& m) {
  AnswerSet out;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i]) out.push_back(static_cast<EntityId>(i));
  }
  return out;
}

// Generic backtracking join. Finds, per candidate target value, whether some
// extension satisfies all atoms.
class Join {
 public:
  Join(const ConjunctiveQuery& q, const KnowledgeGraph& g) : g_(g) {
    vars_ = q.variables();
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < vars_.size(); ++i) index.emplace(vars_[i], i);
    incident_.resize(vars_.size());
    for (const auto& a : q.atoms()) {
      Bound b;
      b.rel = g.relation_id(a.relation);
      auto bind = [&](const Term& t, Slot& s) {
        s.is_var = t.is_var();
        s.id = t.is_var() ? static_cast<std::uint32_t>(index.at(t.name)) : g.entity_id(t.name);
      };
      bind(a.subject, b.subj);
      bind(a.object, b.obj);
      atoms_.push_back(b);
      if (b.subj.is_var) incident_[b.subj.id].push_back(atoms_.size() - 1);
      if (b.obj.is_var && !(b.subj.is_var && b.subj.id == b.obj.id)) {
        incident_[b.obj.id].push_back(atoms_.size() - 1);
      }
    }
    value_.assign(vars_.size(), kUnset);
  }

  AnswerSet run() {
    for (const auto& a : atoms_) {
      if (!a.subj.is_var && !a.obj.is_var && !g_.contains(a.subj.id, a.rel, a.obj.id)) return {};
    }
    AnswerSet out;
    for (EntityId e : candidates(0)) {
      value_[0] = e;
      if (consistent(0) && extend(1)) out.push_back(e);
      std::fill(value_.begin(), value_.end(), kUnset);
    }
    return out;
  }

 private:
  static constexpr EntityId kUnset = std::numeric_limits<EntityId>::max();

  struct Slot {
    bool is_var = false;
    std::uint32_t id = 0;
  };
  struct Bound {
    RelationId rel = 0;
    Slot subj, obj;
  };

  EntityId resolve(const Slot& s) const { return s.is_var ? value_[s.id] : s.id; }

  // Candidate values for `var` drawn from the tightest index lookup available.
  std::vector<EntityId> candidates(std::size_t var) const {
    std::span<const EntityId> best;
    bool have = false;
    for (auto ai : incident_[var]) {
      const auto& a = atoms_[ai];
      const bool is_subj = a.subj.is_var && a.subj.id == var;
      const Slot& other = is_subj ? a.obj : a.subj;
      if (other.is_var && other.id == var) continue;
      EntityId o = resolve(other);
      if (o == kUnset) continue;
      auto span = g_.neighbors(o, a.rel, is_subj ? Direction::bwd : Direction::fwd);
      if (!have || span.size() < best.size()) {
        best = span;
        have = true;
      }
    }
    if (have) return {best.begin(), best.end()};
    std::vector<EntityId> all;
    for (EntityId e = 0; e < g_.num_entities(); ++e) all.push_back(e);
    return all;
  }

  bool consistent(std::size_t var) const {
    for (auto ai : incident_[var]) {
      const auto& a = atoms_[ai];
      EntityId s = resolve(a.subj), o = resolve(a.obj);
      if (s == kUnset || o == kUnset) continue;
      if (!g_.contains(s, a.rel, o)) return false;
    }
    return true;
  }

  std::size_t next_variable() const {
    std::size_t best = vars_.size();
    std::size_t best_links = 0;
    for (std::size_t v = 0; v < vars_.size(); ++v) {
      if (value_[v] != kUnset) continue;
      std::size_t links = 0;
      for (auto ai : incident_[v]) {
        const auto& a = atoms_[ai];
        const Slot& other = a.subj.is_var && a.subj.id == v ? a.obj : a.subj;
        if (!other.is_var || value_[other.id] != kUnset) ++links;
      }
      if (best == vars_.size() || links > best_links) {
        best = v;
        best_links = links;
      }
    }
    return best;
  }

  bool extend(std::size_t assigned) {
    if (assigned == vars_.size()) return true;
    auto v = next_variable();
    for (EntityId e : candidates(v)) {
      value_[v] = e;
      if (consistent(v) && extend(assigned + 1)) return true;
    }
    value_[v] = kUnset;
    return false;
  }

  const KnowledgeGraph& g_;
  std::vector<std::string> vars_;
  std::vector<Bound> atoms_;
  std::vector<std::vector<std::size_t>> incident_;
  std::vector<EntityId> value_;
};

}  // namespace

AnswerSet evaluate_cq(const ConjunctiveQuery& q, const KnowledgeGraph& g, CqStrategy strategy) {
  require_pure(q, "evaluate_cq");
  if (q.atoms().empty()) return evaluate_plan(q, g);
  if (strategy == CqStrategy::automatic) {
    auto graph = build_query_graph(q);
    if (graph.connected() && graph.edges.size() + 1 == graph.nodes.size()) {
      return evaluate_plan(q, g);
    }
  }
  return Join(q, g).run();
}

AnswerSet evaluate_plan(const ExecutionPlan& plan, const KnowledgeGraph& g) {
  const auto n = g.num_entities();
  std::vector<Bitmap> values(plan.nodes.size());
  for (std::size_t i = 0; i < plan.nodes.size(); ++i) {
    const auto& node = plan.nodes[i];
    Bitmap& out = values[i];
    switch (node.op) {
      case PlanOp::anchor:
        out.assign(n, 0);
        if (node.entity >= n) fail(ErrorKind::index, "anchor entity out of range");
        out[node.entity] = 1;
        break;
      case PlanOp::existential:
        out.assign(n, 1);
        break;
      case PlanOp::projection: {
        out.assign(n, 0);
        const Bitmap& in = values[node.children.front()];
        for (EntityId a = 0; a < n; ++a) {
          if (!in[a]) continue;
          for (EntityId b : g.neighbors(a, node.relation, node.dir)) out[b] = 1;
        }
        break;
      }
      case PlanOp::intersection:
        out = values[node.children.front()];
        for (std::size_t k = 1; k < node.children.size(); ++k) {
          const Bitmap& in = values[node.children[k]];
          for (std::size_t e = 0; e < n; ++e) out[e] = out[e] && in[e];
        }
        break;
      case PlanOp::disjunction:
        out = values[node.children.front()];
        for (std::size_t k = 1; k < node.children.size(); ++k) {
          const Bitmap& in = values[node.children[k]];
          for (std::size_t e = 0; e < n; ++e) out[e] = out[e] || in[e];
        }
        break;
      case PlanOp::negation:
        out = values[node.children.front()];
        for (auto& v : out) v = !v;
        break;
    }
    // Children are consumed exactly once; free them early.
    for (auto c : node.children) Bitmap().swap(values[c]);
  }
  return to_answers(values.back());
}

AnswerSet evaluate_plan(const ConjunctiveQuery& q, const KnowledgeGraph& g) {
  return evaluate_plan(compile_plan(q, g.vocabulary()), g);
}

AnswerSet evaluate(const ConjunctiveQuery& q, const KnowledgeGraph& g) {
  return q.is_pure() ? evaluate_cq(q, g) : evaluate_plan(q, g);
}

}  // namespace kgq
