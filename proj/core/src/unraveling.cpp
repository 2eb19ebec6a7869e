#include "kgq/unraveling.hpp"

#include <functional>

#include "kgq/error.hpp"
#include "kgq/query_json.hpp"

namespace kgq {

std::string QueryPath::signature() const {
  std::string sig;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (i) sig += '.';
    sig += std::to_string(steps[i].atom);
    sig += steps[i].dir == Direction::fwd ? 'f' : 'b';
  }
  return sig;
}

namespace {

// Node reached by crossing `atom` from `from` in direction `dir`, if legal.
const Term* traverse(const Atom& atom, const Term& from, Direction dir) {
  if (dir == Direction::fwd) return atom.subject == from ? &atom.object : nullptr;
  return atom.object == from ? &atom.subject : nullptr;
}

// Legal (direction, next node) moves across `atom` from `from`. A self-loop
// offers both directions; they unravel to differently oriented atoms.
template <typename F>
void for_each_move(const Atom& atom, const Term& from, F&& f) {
  if (atom.subject == from) f(Direction::fwd, atom.object);
  if (atom.object == from) f(Direction::bwd, atom.subject);
}

// `next` undoes `prev`. Crossing a self-loop twice the same way moves on.
bool is_return(const std::vector<Atom>& atoms, const PathStep& prev, std::size_t atom,
               Direction dir) {
  if (prev.atom != atom) return false;
  const Atom& a = atoms[atom];
  return a.subject != a.object || prev.dir != dir;
}

}  // namespace

bool is_path(const ConjunctiveQuery& q, const QueryPath& p) {
  const auto& atoms = q.atoms();
  if (p.start != Term::var(q.target)) return false;
  const Term* at = &p.start;
  for (const auto& s : p.steps) {
    if (s.atom >= atoms.size()) return false;
    const Term* next = traverse(atoms[s.atom], *at, s.dir);
    if (!next || *next != s.node) return false;
    at = &s.node;
  }
  return true;
}

bool is_valid_path(const ConjunctiveQuery& q, const QueryPath& p) {
  if (!is_path(q, p)) return false;
  const auto& atoms = q.atoms();
  for (std::size_t i = 1; i < p.steps.size(); ++i) {
    if (is_return(atoms, p.steps[i - 1], p.steps[i].atom, p.steps[i].dir)) return false;
  }
  return true;
}

std::vector<ValidPath> valid_paths(const ConjunctiveQuery& q, int max_length) {
  require_pure(q, "valid_paths");
  if (max_length < 0) fail(ErrorKind::argument, "path length bound must be >= 0");
  const auto& atoms = q.atoms();
  std::vector<ValidPath> out;
  ValidPath current{Term::var(q.target), {}};
  std::function<void()> dfs = [&] {
    out.push_back(current);
    if (current.length() == static_cast<std::size_t>(max_length)) return;
    const Term here = current.end();
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      for_each_move(atoms[i], here, [&](Direction dir, const Term& next) {
        if (!current.steps.empty() && is_return(atoms, current.steps.back(), i, dir)) return;
        current.steps.push_back({i, dir, next});
        dfs();
        current.steps.pop_back();
      });
    }
  };
  dfs();
  return out;
}

ValidPath canonicalize_path(const ConjunctiveQuery& q, const QueryPath& p) {
  require_pure(q, "canonicalize_path");
  if (!is_path(q, p)) fail(ErrorKind::argument, "step sequence is not a path of the query");
  const auto& atoms = q.atoms();
  ValidPath out{p.start, {}};
  for (const auto& s : p.steps) {
    if (!out.steps.empty() && is_return(atoms, out.steps.back(), s.atom, s.dir)) {
      out.steps.pop_back();
      if (out.end() != s.node) fail(ErrorKind::internal, "detour did not return to its origin");
    } else {
      out.steps.push_back(s);
    }
  }
  return out;
}

UnravelResult unravel(const ConjunctiveQuery& q, int depth, const UnravelOptions& opts) {
  require_pure(q, "unravel");
  if (depth < 1) fail(ErrorKind::argument, "unraveling depth must be >= 1");
  if (depth > opts.max_depth) {
    fail(ErrorKind::argument, "unraveling depth " + std::to_string(depth) +
                                  " exceeds the safety cap " + std::to_string(opts.max_depth));
  }
  if (!build_query_graph(q).connected()) {
    fail(ErrorKind::disconnected_query, "cannot unravel a disconnected query");
  }
  const auto& atoms = q.atoms();

  UnravelResult result;
  result.query.id = q.id;
  result.query.target = q.target;
  auto& out_atoms = result.query.branches.front();

  auto name_of = [&](const ValidPath& p) {
    return p.steps.empty() ? q.target : p.end().name + "@" + p.signature();
  };
  auto node_of = [&](const ValidPath& p) {
    return p.anchored() ? p.end() : Term::var(name_of(p));
  };

  ValidPath current{Term::var(q.target), {}};
  std::function<void()> dfs = [&] {
    if (!current.anchored()) result.variable_paths.emplace(name_of(current), current);
    if (current.length() == static_cast<std::size_t>(depth)) return;
    const Term here = current.end();
    const Term parent = node_of(current);
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      for_each_move(atoms[i], here, [&](Direction dir, const Term& next) {
        if (!current.steps.empty() && is_return(atoms, current.steps.back(), i, dir)) return;
        current.steps.push_back({i, dir, next});
        const Term child = node_of(current);
        Atom a{atoms[i].relation, parent, child, false};
        if (dir == Direction::bwd) std::swap(a.subject, a.object);
        out_atoms.push_back(std::move(a));
        if (out_atoms.size() > opts.max_atoms) {
          fail(ErrorKind::argument, "unraveling exceeds " + std::to_string(opts.max_atoms) +
                                        " atoms; lower the depth");
        }
        result.atom_paths.push_back(current);
        result.atom_origin.push_back(i);
        if (!current.anchored() || opts.through_constants) dfs();
        current.steps.pop_back();
      });
    }
  };
  dfs();

  if (result.variable_paths.size() != 1 + [&] {
        std::size_t n = 0;
        for (const auto& p : result.atom_paths) n += p.anchored() ? 0 : 1;
        return n;
      }()) {
    fail(ErrorKind::internal, "unraveling variable names collided");
  }
  return result;
}

std::map<std::string, Term> canonical_projection(const UnravelResult& u) {
  std::map<std::string, Term> h;
  for (const auto& [name, path] : u.variable_paths) h.emplace(name, path.end());
  return h;
}

nlohmann::json path_to_json(const QueryPath& p) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : p.steps) {
    steps.push_back({{"atom", s.atom}, {"dir", to_string(s.dir)}, {"node", term_to_json(s.node)}});
  }
  return {{"start", term_to_json(p.start)}, {"steps", std::move(steps)}};
}

nlohmann::json provenance_to_json(const UnravelResult& u) {
  nlohmann::json vars = nlohmann::json::object();
  for (const auto& [name, path] : u.variable_paths) vars[name] = path_to_json(path);
  nlohmann::json atoms = nlohmann::json::array();
  for (std::size_t i = 0; i < u.atom_paths.size(); ++i) {
    atoms.push_back(
        {{"atom", i}, {"source_atom", u.atom_origin[i]}, {"path", path_to_json(u.atom_paths[i])}});
  }
  return {{"variables", std::move(vars)}, {"atoms", std::move(atoms)}};
}

}  // namespace kgq
