#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kgq/kg_store.hpp"
#include "kgq/query.hpp"

namespace kgq {

/// One traversal step: through atom `atom` of the query, forward (subject to
/// object) or backward, arriving at `node`.
struct PathStep {
  std::size_t atom = 0;
  Direction dir = Direction::fwd;
  Term node;

  auto operator<=>(const PathStep&) const = default;
};

/// x_0, A_1, x_1, ..., A_k, x_k starting at the query target. Used both for
/// valid paths and for unrestricted paths (which may immediately re-cross an
/// atom); is_valid_path() tells them apart.
struct QueryPath {
  Term start;
  std::vector<PathStep> steps;

  std::size_t length() const noexcept { return steps.size(); }
  const Term& end() const noexcept { return steps.empty() ? start : steps.back().node; }
  bool anchored() const noexcept { return end().is_const(); }

  /// Compact step signature such as "0f.2b"; empty for the length-0 path.
  std::string signature() const;

  auto operator<=>(const QueryPath&) const = default;
};

using ValidPath = QueryPath;

/// Steps are consistent traversals of the atoms of `q` from its target.
bool is_path(const ConjunctiveQuery& q, const QueryPath& p);
/// is_path() and no step immediately undoes the previous one: the same atom
/// is never crossed twice in a row, except a self-loop crossed again in the
/// same direction.
bool is_valid_path(const ConjunctiveQuery& q, const QueryPath& p);

/// Every valid path of length <= max_length, lexicographic by step sequence.
/// Self-loops are crossed in both directions.
std::vector<ValidPath> valid_paths(const ConjunctiveQuery& q, int max_length);

/// Cancels every y, A, z, A, y detour until the path is valid. The end node
/// is unchanged. Throws argument errors for inconsistent step sequences.
ValidPath canonicalize_path(const ConjunctiveQuery& q, const QueryPath& p);

struct UnravelOptions {
  int max_depth = 16;  // hard cap, exceeding it is an error
  std::size_t max_atoms = std::size_t{1} << 22;
  /// Keep extending valid paths after they reach a constant. This is the
  /// literal construction and is optimal among all tree-like approximations
  /// of depth <= d, but when a constant occurs in several atoms the atoms
  /// found past it hang off a constant occurrence, so the result is no longer
  /// tree-like. By default anchored paths end their branch.
  bool through_constants = false;
};

struct UnravelResult {
  ConjunctiveQuery query;
  /// Unraveling variable name -> the unanchored valid path it stands for.
  std::map<std::string, ValidPath> variable_paths;
  /// Per atom of `query`: the path that produced its child end.
  std::vector<ValidPath> atom_paths;
  /// Per atom of `query`: index of the source atom of q it copies.
  std::vector<std::size_t> atom_origin;
};

/// Depth-d unraveling of a pure connected CQ. Variables are the unanchored
/// valid paths of length <= d whose interior nodes are variables; anchored
/// paths end their branch in a constant leaf (see through_constants). The target keeps its name and
/// other variables are named `<end>@<signature>`.
UnravelResult unravel(const ConjunctiveQuery& q, int depth, const UnravelOptions& opts = {});

/// The map z_P -> end(P) from the unraveling back into q.
std::map<std::string, Term> canonical_projection(const UnravelResult& u);

nlohmann::json path_to_json(const QueryPath& p);
/// {"variables": {name: path}, "atoms": [{"atom": i, "source_atom": j, "path": path}]}
nlohmann::json provenance_to_json(const UnravelResult& u);

}  // namespace kgq
