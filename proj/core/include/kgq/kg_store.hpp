#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

namespace kgq {

using EntityId = std::uint32_t;
using RelationId = std::uint32_t;

enum class Direction : std::uint8_t { fwd, bwd };

std::string_view to_string(Direction dir);

struct Triple {
  EntityId head = 0;
  RelationId relation = 0;
  EntityId tail = 0;

  auto operator<=>(const Triple&) const = default;
};

/// Name <-> dense id map. Ids are assigned in first-appearance order.
class Dictionary {
 public:
  Dictionary() = default;
  explicit Dictionary(std::vector<std::string> names);

  std::uint32_t intern(std::string_view name);
  std::optional<std::uint32_t> find(std::string_view name) const;
  const std::string& name(std::uint32_t id) const;
  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }

  /// True if this dictionary's names are a prefix of `other`'s.
  bool is_prefix_of(const Dictionary& other) const;

  bool operator==(const Dictionary& other) const { return names_ == other.names_; }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t, Hash, std::equal_to<>> ids_;
};

struct Vocabulary {
  Dictionary entities;
  Dictionary relations;
};

/// Immutable knowledge graph G = (E, R, S) with per-relation CSR indexes
/// in both directions.
class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;

  /// Deduplicates `triples`. Every id must be in range of the dictionaries.
  static KnowledgeGraph from_triples(Vocabulary vocab, std::vector<Triple> triples);

  std::size_t num_entities() const noexcept { return vocab_.entities.size(); }
  std::size_t num_relations() const noexcept { return vocab_.relations.size(); }
  std::size_t num_edges() const noexcept { return edges_.size(); }

  const Vocabulary& vocabulary() const noexcept { return vocab_; }
  const Dictionary& entities() const noexcept { return vocab_.entities; }
  const Dictionary& relations() const noexcept { return vocab_.relations; }

  /// All triples, sorted by (head, relation, tail).
  std::span<const Triple> edges() const noexcept { return edges_; }

  /// fwd: tails t with (node, rel, t); bwd: heads h with (h, rel, node). Sorted.
  std::span<const EntityId> neighbors(EntityId node, RelationId rel, Direction dir) const;

  bool contains(EntityId head, RelationId rel, EntityId tail) const;
  bool contains(const Triple& t) const { return contains(t.head, t.relation, t.tail); }

  EntityId entity_id(std::string_view name) const;
  RelationId relation_id(std::string_view name) const;

 private:
  struct Csr {
    std::vector<std::uint32_t> offsets;  // num_entities + 1
    std::vector<EntityId> targets;
  };

  Vocabulary vocab_;
  std::vector<Triple> edges_;
  std::vector<Csr> fwd_;  // per relation
  std::vector<Csr> bwd_;
};

/// Accumulates triples from one or more sources into a shared vocabulary.
class GraphBuilder {
 public:
  GraphBuilder() = default;
  explicit GraphBuilder(Vocabulary seed) : vocab_(std::move(seed)) {}

  void add(std::string_view head, std::string_view relation, std::string_view tail);
  void add(const Triple& t);
  /// Reads `head<TAB>relation<TAB>tail` lines. Returns the number of lines read.
  std::size_t add_tsv(const std::filesystem::path& path);

  Vocabulary& vocabulary() noexcept { return vocab_; }
  KnowledgeGraph build() &&;

 private:
  Vocabulary vocab_;
  std::vector<Triple> triples_;
};

KnowledgeGraph load_graph(const std::filesystem::path& path);
/// Loads with ids of `seed` preserved; new names are appended.
KnowledgeGraph load_graph(const std::filesystem::path& path, const Vocabulary& seed);

/// Union of edge sets; `a`'s ids are preserved and `b`'s new names appended.
KnowledgeGraph merge(const KnowledgeGraph& a, const KnowledgeGraph& b);

/// Re-expresses `g` over a larger vocabulary whose dictionaries extend g's.
KnowledgeGraph extend_vocabulary(const KnowledgeGraph& g, const Vocabulary& vocab);

/// A train graph and a full graph sharing one vocabulary, with train ⊆ full.
struct GraphPair {
  KnowledgeGraph train;
  KnowledgeGraph full;
};

/// `full` may hold either all triples or only the triples missing from train;
/// the result's full graph is the union in both cases.
GraphPair align_pair(const KnowledgeGraph& train, const KnowledgeGraph& full);

void write_tsv(const KnowledgeGraph& g, const std::filesystem::path& path);

/// {"entities": [...], "relations": [...]} in id order.
nlohmann::json dictionaries_to_json(const KnowledgeGraph& g);

}  // namespace kgq
