#include "kgq/kg_store.hpp"

#include <algorithm>
#include <fstream>

#include "kgq/error.hpp"

namespace kgq {

std::string_view to_string(Direction dir) { return dir == Direction::fwd ? "fwd" : "bwd"; }

Dictionary::Dictionary(std::vector<std::string> names) {
  for (auto& n : names) intern(n);
}

std::uint32_t Dictionary::intern(std::string_view name) {
  if (auto it = ids_.find(name); it != ids_.end()) return it->second;
  auto id = static_cast<std::uint32_t>(names_.size());
  names_.emplace_back(name);
  ids_.emplace(names_.back(), id);
  return id;
}

std::optional<std::uint32_t> Dictionary::find(std::string_view name) const {
  if (auto it = ids_.find(name); it != ids_.end()) return it->second;
  return std::nullopt;
}

const std::string& Dictionary::name(std::uint32_t id) const {
  if (id >= names_.size()) {
    fail(ErrorKind::index, "dictionary id " + std::to_string(id) + " out of range (size " +
                               std::to_string(names_.size()) + ")");
  }
  return names_[id];
}

bool Dictionary::is_prefix_of(const Dictionary& other) const {
  return names_.size() <= other.names_.size() &&
         std::equal(names_.begin(), names_.end(), other.names_.begin());
}

namespace {

void build_csr(std::size_t num_entities, std::span<const Triple> edges, RelationId rel,
               Direction dir, std::vector<std::uint32_t>& offsets,
               std::vector<EntityId>& targets) {
  offsets.assign(num_entities + 1, 0);
  for (const auto& t : edges) {
    if (t.relation != rel) continue;
    EntityId src = dir == Direction::fwd ? t.head : t.tail;
    ++offsets[src + 1];
  }
  for (std::size_t i = 0; i < num_entities; ++i) offsets[i + 1] += offsets[i];
  targets.resize(offsets.back());
  std::vector<std::uint32_t> cursor(offsets.begin(), offsets.end() - 1);
  for (const auto& t : edges) {
    if (t.relation != rel) continue;
    EntityId src = dir == Direction::fwd ? t.head : t.tail;
    EntityId dst = dir == Direction::fwd ? t.tail : t.head;
    targets[cursor[src]++] = dst;
  }
  for (std::size_t i = 0; i < num_entities; ++i) {
    std::sort(targets.begin() + offsets[i], targets.begin() + offsets[i + 1]);
  }
}

}  // namespace

KnowledgeGraph KnowledgeGraph::from_triples(Vocabulary vocab, std::vector<Triple> triples) {
  const auto ne = vocab.entities.size();
  const auto nr = vocab.relations.size();
  for (const auto& t : triples) {
    if (t.head >= ne || t.tail >= ne || t.relation >= nr) {
      fail(ErrorKind::index, "triple references an id outside the vocabulary");
    }
  }
  std::sort(triples.begin(), triples.end());
  triples.erase(std::unique(triples.begin(), triples.end()), triples.end());

  KnowledgeGraph g;
  g.vocab_ = std::move(vocab);
  g.edges_ = std::move(triples);
  g.fwd_.resize(nr);
  g.bwd_.resize(nr);
  // Bucket by relation first so each CSR build only scans its own edges.
  std::vector<std::vector<Triple>> by_rel(nr);
  for (const auto& t : g.edges_) by_rel[t.relation].push_back(t);
  for (RelationId r = 0; r < nr; ++r) {
    build_csr(ne, by_rel[r], r, Direction::fwd, g.fwd_[r].offsets, g.fwd_[r].targets);
    build_csr(ne, by_rel[r], r, Direction::bwd, g.bwd_[r].offsets, g.bwd_[r].targets);
  }
  return g;
}

std::span<const EntityId> KnowledgeGraph::neighbors(EntityId node, RelationId rel,
                                                    Direction dir) const {
  if (node >= num_entities()) {
    fail(ErrorKind::index, "entity id " + std::to_string(node) + " out of range");
  }
  if (rel >= num_relations()) {
    fail(ErrorKind::index, "relation id " + std::to_string(rel) + " out of range");
  }
  const Csr& csr = dir == Direction::fwd ? fwd_[rel] : bwd_[rel];
  return std::span<const EntityId>(csr.targets).subspan(
      csr.offsets[node], csr.offsets[node + 1] - csr.offsets[node]);
}

bool KnowledgeGraph::contains(EntityId head, RelationId rel, EntityId tail) const {
  if (head >= num_entities() || tail >= num_entities() || rel >= num_relations()) return false;
  auto tails = neighbors(head, rel, Direction::fwd);
  return std::binary_search(tails.begin(), tails.end(), tail);
}

EntityId KnowledgeGraph::entity_id(std::string_view name) const {
  auto id = vocab_.entities.find(name);
  if (!id) fail(ErrorKind::binding, "unknown entity '" + std::string(name) + "'");
  return *id;
}

RelationId KnowledgeGraph::relation_id(std::string_view name) const {
  auto id = vocab_.relations.find(name);
  if (!id) fail(ErrorKind::binding, "unknown relation '" + std::string(name) + "'");
  return *id;
}

void GraphBuilder::add(std::string_view head, std::string_view relation, std::string_view tail) {
  Triple t;
  t.head = vocab_.entities.intern(head);
  t.relation = vocab_.relations.intern(relation);
  t.tail = vocab_.entities.intern(tail);
  triples_.push_back(t);
}

void GraphBuilder::add(const Triple& t) { triples_.push_back(t); }

std::size_t GraphBuilder::add_tsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::parse, "cannot open '" + path.string() + "'");
  std::string line;
  std::size_t line_no = 0;
  std::size_t read = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::string_view rest(line);
    std::vector<std::string_view> fields;
    for (std::size_t tab; (tab = rest.find('\t')) != std::string_view::npos;) {
      fields.push_back(rest.substr(0, tab));
      rest.remove_prefix(tab + 1);
    }
    fields.push_back(rest);
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty() || fields[2].empty()) {
      fail(ErrorKind::parse, path.string() + ":" + std::to_string(line_no) +
                                 ": expected 3 tab-separated fields");
    }
    add(fields[0], fields[1], fields[2]);
    ++read;
  }
  return read;
}

KnowledgeGraph GraphBuilder::build() && {
  return KnowledgeGraph::from_triples(std::move(vocab_), std::move(triples_));
}

KnowledgeGraph load_graph(const std::filesystem::path& path) { return load_graph(path, {}); }

KnowledgeGraph load_graph(const std::filesystem::path& path, const Vocabulary& seed) {
  GraphBuilder builder(seed);
  if (builder.add_tsv(path) == 0) {
    fail(ErrorKind::empty_graph, "'" + path.string() + "' contains no triples");
  }
  return std::move(builder).build();
}

KnowledgeGraph merge(const KnowledgeGraph& a, const KnowledgeGraph& b) {
  GraphBuilder builder(a.vocabulary());
  for (const auto& t : a.edges()) builder.add(t);
  for (const auto& t : b.edges()) {
    builder.add(b.entities().name(t.head), b.relations().name(t.relation),
                b.entities().name(t.tail));
  }
  return std::move(builder).build();
}

KnowledgeGraph extend_vocabulary(const KnowledgeGraph& g, const Vocabulary& vocab) {
  if (!g.entities().is_prefix_of(vocab.entities) ||
      !g.relations().is_prefix_of(vocab.relations)) {
    fail(ErrorKind::binding, "vocabulary does not extend the graph's dictionaries");
  }
  return KnowledgeGraph::from_triples(vocab, {g.edges().begin(), g.edges().end()});
}

GraphPair align_pair(const KnowledgeGraph& train, const KnowledgeGraph& full) {
  GraphPair pair;
  pair.full = merge(train, full);
  pair.train = extend_vocabulary(train, pair.full.vocabulary());
  return pair;
}

void write_tsv(const KnowledgeGraph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::parse, "cannot write '" + path.string() + "'");
  for (const auto& t : g.edges()) {
    out << g.entities().name(t.head) << '\t' << g.relations().name(t.relation) << '\t'
        << g.entities().name(t.tail) << '\n';
  }
}

nlohmann::json dictionaries_to_json(const KnowledgeGraph& g) {
  return {{"entities", g.entities().names()}, {"relations", g.relations().names()}};
}

}  // namespace kgq
