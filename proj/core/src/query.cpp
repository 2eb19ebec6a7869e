#include "kgq/query.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>

#include "kgq/error.hpp"

namespace kgq {

std::string to_string(const Term& t) { return t.is_var() ? t.name : "'" + t.name + "'"; }

std::string to_string(const Atom& a) {
  return std::string(a.negated ? "¬" : "") + a.relation + "(" + to_string(a.subject) + "," +
         to_string(a.object) + ")";
}

ConjunctiveQuery ConjunctiveQuery::make(std::string target, std::vector<Atom> atoms,
                                        std::string id) {
  ConjunctiveQuery q;
  q.id = std::move(id);
  q.target = std::move(target);
  q.branches = {std::move(atoms)};
  return q;
}

bool ConjunctiveQuery::has_negation() const {
  for (const auto& b : branches) {
    for (const auto& a : b) {
      if (a.negated) return true;
    }
  }
  return false;
}

bool ConjunctiveQuery::is_pure() const { return branches.size() == 1 && !has_negation(); }

const std::vector<Atom>& ConjunctiveQuery::atoms() const {
  if (branches.size() != 1) {
    fail(ErrorKind::unsupported_shape, "query has " + std::to_string(branches.size()) +
                                           " branches; expected a single conjunction");
  }
  return branches.front();
}

namespace {

template <typename Pred>
std::vector<std::string> collect_terms(const ConjunctiveQuery& q, Pred keep) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  auto visit = [&](const Term& t) {
    if (keep(t) && seen.insert(t.name).second) out.push_back(t.name);
  };
  for (const auto& b : q.branches) {
    for (const auto& a : b) {
      visit(a.subject);
      visit(a.object);
    }
  }
  return out;
}

}  // namespace

std::vector<std::string> ConjunctiveQuery::variables() const {
  auto vars = collect_terms(*this, [](const Term& t) { return t.is_var(); });
  auto it = std::find(vars.begin(), vars.end(), target);
  if (it != vars.end()) vars.erase(it);
  vars.insert(vars.begin(), target);
  return vars;
}

std::vector<std::string> ConjunctiveQuery::constants() const {
  return collect_terms(*this, [](const Term& t) { return t.is_const(); });
}

std::vector<std::string> ConjunctiveQuery::relations() const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& b : branches) {
    for (const auto& a : b) {
      if (seen.insert(a.relation).second) out.push_back(a.relation);
    }
  }
  return out;
}

void require_pure(const ConjunctiveQuery& q, const char* operation) {
  if (!q.is_pure()) {
    fail(ErrorKind::unsupported_shape,
         std::string(operation) + " requires a pure conjunctive query (single branch, no negation)");
  }
}

std::string to_string(const ConjunctiveQuery& q) {
  std::string out = "q(" + q.target + ") <- ";
  for (std::size_t b = 0; b < q.branches.size(); ++b) {
    if (b) out += " ∨ ";
    if (q.branches.size() > 1) out += "(";
    for (std::size_t i = 0; i < q.branches[b].size(); ++i) {
      if (i) out += " ∧ ";
      out += to_string(q.branches[b][i]);
    }
    if (q.branches.size() > 1) out += ")";
  }
  return out;
}

std::vector<std::vector<std::size_t>> QueryGraph::incidence() const {
  std::vector<std::vector<std::size_t>> inc(nodes.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    inc[edges[e].from].push_back(e);
    if (edges[e].to != edges[e].from) inc[edges[e].to].push_back(e);
  }
  return inc;
}

bool QueryGraph::connected() const {
  if (nodes.empty()) return true;
  auto inc = incidence();
  std::vector<bool> seen(nodes.size(), false);
  std::vector<std::size_t> stack{root};
  seen[root] = true;
  std::size_t count = 1;
  while (!stack.empty()) {
    auto n = stack.back();
    stack.pop_back();
    for (auto e : inc[n]) {
      auto other = edges[e].from == n ? edges[e].to : edges[e].from;
      if (!seen[other]) {
        seen[other] = true;
        ++count;
        stack.push_back(other);
      }
    }
  }
  return count == nodes.size();
}

QueryGraph build_query_graph_unchecked(const std::vector<Atom>& atoms, const std::string& target) {
  QueryGraph g;
  std::map<std::string, std::size_t> var_nodes;
  g.nodes.push_back({Term::var(target)});
  var_nodes.emplace(target, 0);
  auto node_for = [&](const Term& t) -> std::size_t {
    if (t.is_const()) {
      g.nodes.push_back({t});
      return g.nodes.size() - 1;
    }
    auto [it, inserted] = var_nodes.emplace(t.name, g.nodes.size());
    if (inserted) g.nodes.push_back({t});
    return it->second;
  };
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    auto from = node_for(atoms[i].subject);
    auto to = node_for(atoms[i].object);
    g.edges.push_back({from, to, i});
  }
  return g;
}

QueryGraph build_query_graph(const ConjunctiveQuery& q) {
  require_pure(q, "build_query_graph");
  return build_query_graph_unchecked(q.atoms(), q.target);
}

ShapeReport classify_branch(const std::vector<Atom>& atoms, const std::string& target) {
  auto g = build_query_graph_unchecked(atoms, target);
  if (!g.connected()) {
    fail(ErrorKind::disconnected_query, "query graph is not connected to target '" + target + "'");
  }
  ShapeReport r;
  r.is_tree_like = g.edges.size() + 1 == g.nodes.size();
  r.is_cyclic = !r.is_tree_like;
  if (!r.is_tree_like) return r;

  auto inc = g.incidence();
  std::vector<std::size_t> dist(g.nodes.size(), 0);
  std::vector<bool> seen(g.nodes.size(), false);
  std::queue<std::size_t> frontier;
  frontier.push(QueryGraph::root);
  seen[QueryGraph::root] = true;
  std::size_t depth = 0;
  bool anchored = !atoms.empty();
  while (!frontier.empty()) {
    auto n = frontier.front();
    frontier.pop();
    depth = std::max(depth, dist[n]);
    if (n != QueryGraph::root && inc[n].size() == 1 && g.nodes[n].term.is_var()) anchored = false;
    for (auto e : inc[n]) {
      auto other = g.edges[e].from == n ? g.edges[e].to : g.edges[e].from;
      if (!seen[other]) {
        seen[other] = true;
        dist[other] = dist[n] + 1;
        frontier.push(other);
      }
    }
  }
  r.is_anchored = anchored;
  r.depth = depth;
  return r;
}

ShapeReport classify(const ConjunctiveQuery& q) {
  require_pure(q, "classify");
  return classify_branch(q.atoms(), q.target);
}

}  // namespace kgq
