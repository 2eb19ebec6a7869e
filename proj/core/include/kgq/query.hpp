#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace kgq {

/// A variable or a constant (entity name) in a query.
struct Term {
  enum class Kind : unsigned char { variable, constant };

  Kind kind = Kind::variable;
  std::string name;

  static Term var(std::string name) { return {Kind::variable, std::move(name)}; }
  static Term constant(std::string name) { return {Kind::constant, std::move(name)}; }

  bool is_var() const noexcept { return kind == Kind::variable; }
  bool is_const() const noexcept { return kind == Kind::constant; }

  auto operator<=>(const Term&) const = default;
};

/// Debug rendering: variables bare, constants as `'name'`.
std::string to_string(const Term& t);

struct Atom {
  std::string relation;
  Term subject;
  Term object;
  /// Negates the whole branch hanging below this atom (see compile_plan).
  bool negated = false;

  auto operator<=>(const Atom&) const = default;
};

std::string to_string(const Atom& a);

/// Unary conjunctive query q(x) <- A_1 ∧ ... ∧ A_m. Several branches encode a
/// union (DNF) for the 2u/up workload types.
struct ConjunctiveQuery {
  std::string id;
  std::string target = "x";
  std::vector<std::vector<Atom>> branches{{}};

  /// Single-branch query over `atoms`.
  static ConjunctiveQuery make(std::string target, std::vector<Atom> atoms, std::string id = {});

  /// Single branch and no negated atom.
  bool is_pure() const;
  bool has_negation() const;

  /// Atoms of a single-branch query; throws unsupported_shape for unions.
  const std::vector<Atom>& atoms() const;

  /// Variables in first-appearance order, target first.
  std::vector<std::string> variables() const;
  /// Distinct constant names in first-appearance order.
  std::vector<std::string> constants() const;
  std::vector<std::string> relations() const;

  bool operator==(const ConjunctiveQuery&) const = default;
};

/// Throws unsupported_shape unless q is a pure CQ.
void require_pure(const ConjunctiveQuery& q, const char* operation);

std::string to_string(const ConjunctiveQuery& q);

/// Multigraph over Var(q) ∪ ConOcc(q): one node per variable, one node per
/// constant occurrence, one edge per atom.
struct QueryGraph {
  struct Node {
    Term term;
  };
  struct Edge {
    std::size_t from = 0;  // subject node
    std::size_t to = 0;    // object node
    std::size_t atom = 0;  // index into the branch's atoms
  };

  std::vector<Node> nodes;  // nodes[0] is the target
  std::vector<Edge> edges;
  static constexpr std::size_t root = 0;

  /// Incident edge ids per node (self-loops listed once).
  std::vector<std::vector<std::size_t>> incidence() const;
  bool connected() const;
};

/// Query graph of a single-branch query. Negated atoms are kept as edges; pure
/// callers should check is_pure() first.
QueryGraph build_query_graph_unchecked(const std::vector<Atom>& atoms, const std::string& target);

/// Query graph of a pure CQ; throws unsupported_shape otherwise.
QueryGraph build_query_graph(const ConjunctiveQuery& q);

struct ShapeReport {
  bool is_tree_like = false;
  bool is_anchored = false;
  bool is_cyclic = false;
  std::optional<std::size_t> depth;
};

/// Shape of a pure CQ. Throws disconnected_query for disconnected graphs.
ShapeReport classify(const ConjunctiveQuery& q);
/// Same, but ignores negation flags and inspects a single branch.
ShapeReport classify_branch(const std::vector<Atom>& atoms, const std::string& target);

}  // namespace kgq
