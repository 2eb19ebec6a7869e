#include "kgq/querygen.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <iterator>

#include "kgq/error.hpp"
#include "kgq/parallel.hpp"
#include "kgq/query_json.hpp"
#include "kgq/random.hpp"

namespace kgq {

namespace {

constexpr std::array kNames = {
    std::pair{QueryType::p1, "1p"},   std::pair{QueryType::p2, "2p"},
    std::pair{QueryType::p3, "3p"},   std::pair{QueryType::i2, "2i"},
    std::pair{QueryType::i3, "3i"},   std::pair{QueryType::ip, "ip"},
    std::pair{QueryType::pi, "pi"},   std::pair{QueryType::in2, "2in"},
    std::pair{QueryType::in3, "3in"}, std::pair{QueryType::inp, "inp"},
    std::pair{QueryType::pin, "pin"}, std::pair{QueryType::pni, "pni"},
    std::pair{QueryType::u2, "2u"},   std::pair{QueryType::up, "up"},
    std::pair{QueryType::double_path, "double_path"},
    std::pair{QueryType::triangle, "triangle"},
    std::pair{QueryType::square, "square"},
};

constexpr std::array kWorkload = {QueryType::p1,  QueryType::p2,  QueryType::p3,  QueryType::i2,
                                  QueryType::i3,  QueryType::ip,  QueryType::pi,  QueryType::in2,
                                  QueryType::in3, QueryType::inp, QueryType::pin, QueryType::pni,
                                  QueryType::u2,  QueryType::up};
constexpr std::array kCyclic = {QueryType::double_path, QueryType::triangle, QueryType::square};

// Shape template. Node 0 is the target; atoms sharing a slot share a relation.
struct TNode {
  const char* name;
  bool anchor;
};
struct TAtom {
  int branch;
  int slot;
  int subject;
  int object;
  bool negated = false;
  bool random_orientation = false;
};
struct Template {
  std::vector<TNode> nodes;
  std::vector<TAtom> atoms;
  bool distinct_variables = false;  // cycle instances must not collapse
};

Template make_template(QueryType t) {
  const TNode x{"x", false}, y{"y", false}, z{"z", false}, w{"w", false};
  const TNode a{"a", true}, b{"b", true}, c{"c", true};
  auto cycle = [](std::vector<TNode> nodes) {
    Template tpl{std::move(nodes), {}, true};
    const int n = static_cast<int>(tpl.nodes.size());
    for (int i = 0; i < n; ++i) tpl.atoms.push_back({0, i, i, (i + 1) % n, false, true});
    return tpl;
  };
  switch (t) {
    case QueryType::p1: return {{x, a}, {{0, 0, 1, 0}}};
    case QueryType::p2: return {{x, y, a}, {{0, 0, 2, 1}, {0, 1, 1, 0}}};
    case QueryType::p3: return {{x, y, z, a}, {{0, 0, 3, 2}, {0, 1, 2, 1}, {0, 2, 1, 0}}};
    case QueryType::i2: return {{x, a, b}, {{0, 0, 1, 0}, {0, 1, 2, 0}}};
    case QueryType::i3: return {{x, a, b, c}, {{0, 0, 1, 0}, {0, 1, 2, 0}, {0, 2, 3, 0}}};
    case QueryType::ip: return {{x, y, a, b}, {{0, 0, 2, 1}, {0, 1, 3, 1}, {0, 2, 1, 0}}};
    case QueryType::pi: return {{x, y, a, b}, {{0, 0, 2, 1}, {0, 1, 1, 0}, {0, 2, 3, 0}}};
    case QueryType::in2: return {{x, a, b}, {{0, 0, 1, 0}, {0, 1, 2, 0, true}}};
    case QueryType::in3:
      return {{x, a, b, c}, {{0, 0, 1, 0}, {0, 1, 2, 0}, {0, 2, 3, 0, true}}};
    case QueryType::inp:
      return {{x, y, a, b}, {{0, 0, 2, 1}, {0, 1, 3, 1, true}, {0, 2, 1, 0}}};
    case QueryType::pin:
      return {{x, y, a, b}, {{0, 0, 2, 1}, {0, 1, 1, 0}, {0, 2, 3, 0, true}}};
    case QueryType::pni:
      return {{x, y, a, b}, {{0, 0, 2, 1}, {0, 1, 1, 0, true}, {0, 2, 3, 0}}};
    case QueryType::u2: return {{x, a, b}, {{0, 0, 1, 0}, {1, 1, 2, 0}}};
    case QueryType::up:
      // (a -R0-> y  ∪  b -R1-> y) -R2-> x, as two branches sharing R2.
      return {{x, y, a, y, b}, {{0, 0, 2, 1}, {0, 2, 1, 0}, {1, 1, 4, 3}, {1, 2, 3, 0}}};
    case QueryType::double_path:
      return {{x, {"y1", false}, {"y2", false}, w, a},
              {{0, 0, 4, 3},
               {0, 1, 3, 1, false, true},
               {0, 2, 1, 0, false, true},
               {0, 3, 3, 2, false, true},
               {0, 4, 2, 0, false, true}},
              true};
    case QueryType::triangle: return cycle({x, y, z});
    case QueryType::square: return cycle({x, y, z, w});
  }
  fail(ErrorKind::internal, "unhandled query type");
}

class Sampler {
 public:
  Sampler(QueryType type, const KnowledgeGraph& train, const KnowledgeGraph& full,
          const GenOptions& opts)
      : type_(type), tpl_(make_template(type)), train_(train), full_(full), opts_(opts) {}

  LabeledQuery sample(std::size_t index) const {
    Rng rng(derive_seed(opts_.seed, {static_cast<std::uint64_t>(type_), index}));
    for (std::size_t attempt = 0; attempt < opts_.max_attempts; ++attempt) {
      if (auto q = attempt_once(rng, index)) return *std::move(q);
    }
    fail(ErrorKind::exhaustion, "could not instantiate a " + std::string(to_string(type_)) +
                                    " query (#" + std::to_string(index) + ") after " +
                                    std::to_string(opts_.max_attempts) + " attempts");
  }

 private:
  std::optional<LabeledQuery> attempt_once(Rng& rng, std::size_t index) const {
    auto atoms = tpl_.atoms;
    for (auto& a : atoms) {
      if (a.random_orientation && coin(rng)) std::swap(a.subject, a.object);
    }

    const auto edges = full_.edges();
    const auto& seed_edge = edges[uniform_index(rng, edges.size())];
    std::vector<std::optional<EntityId>> value(tpl_.nodes.size());
    value[0] = coin(rng) ? seed_edge.head : seed_edge.tail;
    std::vector<std::optional<RelationId>> slot(atoms.size());
    std::vector<RelationId> rel(atoms.size());
    std::vector<bool> done(atoms.size(), false);

    for (std::size_t placed = 0; placed < atoms.size(); ++placed) {
      // Extend the grounded part before closing cycles.
      std::size_t pick = atoms.size();
      for (std::size_t i = 0; i < atoms.size() && pick == atoms.size(); ++i) {
        if (!done[i] && (value[atoms[i].subject].has_value() != value[atoms[i].object].has_value())) {
          pick = i;
        }
      }
      for (std::size_t i = 0; i < atoms.size() && pick == atoms.size(); ++i) {
        if (!done[i] && value[atoms[i].subject] && value[atoms[i].object]) pick = i;
      }
      if (pick == atoms.size()) fail(ErrorKind::internal, "disconnected query template");
      const auto& a = atoms[pick];
      auto& fixed = slot[a.slot];
      if (value[a.subject] && value[a.object]) {
        std::vector<RelationId> options;
        for (RelationId r = 0; r < full_.num_relations(); ++r) {
          if ((!fixed || *fixed == r) && full_.contains(*value[a.subject], r, *value[a.object])) {
            options.push_back(r);
          }
        }
        if (options.empty()) return std::nullopt;
        rel[pick] = options[uniform_index(rng, options.size())];
      } else {
        const bool from_subject = value[a.subject].has_value();
        const EntityId from = from_subject ? *value[a.subject] : *value[a.object];
        const Direction dir = from_subject ? Direction::fwd : Direction::bwd;
        std::size_t total = 0;
        for (RelationId r = 0; r < full_.num_relations(); ++r) {
          if (!fixed || *fixed == r) total += full_.neighbors(from, r, dir).size();
        }
        if (total == 0) return std::nullopt;
        auto k = uniform_index(rng, total);
        for (RelationId r = 0; r < full_.num_relations(); ++r) {
          if (fixed && *fixed != r) continue;
          auto nb = full_.neighbors(from, r, dir);
          if (k < nb.size()) {
            rel[pick] = r;
            value[from_subject ? a.object : a.subject] = nb[k];
            break;
          }
          k -= nb.size();
        }
      }
      fixed = rel[pick];
      done[pick] = true;
    }

    if (tpl_.distinct_variables) {
      std::vector<EntityId> vars;
      for (std::size_t n = 0; n < tpl_.nodes.size(); ++n) {
        if (!tpl_.nodes[n].anchor) vars.push_back(*value[n]);
      }
      std::sort(vars.begin(), vars.end());
      if (std::adjacent_find(vars.begin(), vars.end()) != vars.end()) return std::nullopt;
    }

    // Which anchors become existential variables.
    std::vector<bool> quantify(tpl_.nodes.size(), false);
    if (opts_.unanchored) {
      std::vector<std::size_t> anchors;
      for (std::size_t n = 0; n < tpl_.nodes.size(); ++n) {
        if (tpl_.nodes[n].anchor) anchors.push_back(n);
      }
      if (!opts_.unanchor_subset) {
        for (auto n : anchors) quantify[n] = true;
      } else if (!anchors.empty()) {
        // Uniform over non-empty subsets.
        const auto mask = 1 + uniform_index(rng, (std::uint64_t{1} << anchors.size()) - 1);
        for (std::size_t k = 0; k < anchors.size(); ++k) quantify[anchors[k]] = (mask >> k) & 1U;
      }
    }

    ConjunctiveQuery q;
    q.id = std::string(to_string(type_)) + "-" + pad(index);
    q.target = "x";
    q.branches.assign(1 + std::max_element(atoms.begin(), atoms.end(), [](auto& l, auto& r) {
                            return l.branch < r.branch;
                          })->branch,
                      {});
    auto term = [&](int n) {
      const auto& node = tpl_.nodes[n];
      if (node.anchor && !quantify[n]) return Term::constant(full_.entities().name(*value[n]));
      return Term::var(node.name);
    };
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const auto& a = atoms[i];
      q.branches[a.branch].push_back(
          {full_.relations().name(rel[i]), term(a.subject), term(a.object), a.negated});
    }

    auto full_answers = evaluate(q, full_);
    if (full_answers.empty()) return std::nullopt;
    auto train_answers = evaluate(q, train_);
    LabeledQuery out{std::move(q), type_, {}, {}};
    std::set_intersection(train_answers.begin(), train_answers.end(), full_answers.begin(),
                          full_answers.end(), std::back_inserter(out.easy));
    std::set_difference(full_answers.begin(), full_answers.end(), train_answers.begin(),
                        train_answers.end(), std::back_inserter(out.hard));
    if (opts_.require_hard && out.hard.empty()) return std::nullopt;
    return out;
  }

  static std::string pad(std::size_t i) {
    auto s = std::to_string(i);
    return std::string(s.size() < 6 ? 6 - s.size() : 0, '0') + s;
  }

  QueryType type_;
  Template tpl_;
  const KnowledgeGraph& train_;
  const KnowledgeGraph& full_;
  const GenOptions& opts_;
};

void write_lines(const std::filesystem::path& path, const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::parse, "cannot write '" + path.string() + "'");
  for (const auto& l : lines) out << l << '\n';
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::parse, "cannot open '" + path.string() + "'");
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

}  // namespace

std::string_view to_string(QueryType t) {
  for (auto [type, name] : kNames) {
    if (type == t) return name;
  }
  return "?";
}

QueryType parse_query_type(std::string_view name) {
  for (auto [type, n] : kNames) {
    if (name == n) return type;
  }
  fail(ErrorKind::usage, "unknown query type '" + std::string(name) + "'");
}

std::span<const QueryType> workload_types() { return kWorkload; }
std::span<const QueryType> cyclic_types() { return kCyclic; }

bool has_negation(QueryType t) {
  return t == QueryType::in2 || t == QueryType::in3 || t == QueryType::inp ||
         t == QueryType::pin || t == QueryType::pni;
}

bool is_union(QueryType t) { return t == QueryType::u2 || t == QueryType::up; }

AnswerSet LabeledQuery::all_answers() const {
  AnswerSet out;
  std::set_union(easy.begin(), easy.end(), hard.begin(), hard.end(), std::back_inserter(out));
  return out;
}

std::vector<LabeledQuery> generate(QueryType type, const KnowledgeGraph& train,
                                   const KnowledgeGraph& full, const GenOptions& opts) {
  if (full.num_edges() == 0) fail(ErrorKind::empty_graph, "cannot sample queries from an empty graph");
  if (!train.vocabulary().entities.is_prefix_of(full.entities()) ||
      !train.vocabulary().relations.is_prefix_of(full.relations()) ||
      train.num_entities() != full.num_entities() || train.num_relations() != full.num_relations()) {
    fail(ErrorKind::binding, "train and full graphs must share one vocabulary");
  }
  Sampler sampler(type, train, full, opts);
  std::vector<LabeledQuery> out(opts.count);
  parallel_for(opts.count, opts.workers, [&](std::size_t i) { out[i] = sampler.sample(i); });
  return out;
}

std::vector<std::vector<UnraveledQuery>> unravel_workload(std::span<const LabeledQuery> batch,
                                                          std::span<const int> depths,
                                                          const UnravelOptions& opts) {
  std::vector<std::vector<UnraveledQuery>> out;
  for (int d : depths) {
    if (d < 1 || d > opts.max_depth) {
      fail(ErrorKind::argument, "unraveling depth " + std::to_string(d) + " outside [1, " +
                                    std::to_string(opts.max_depth) + "]");
    }
    auto& level = out.emplace_back();
    for (const auto& lq : batch) {
      require_pure(lq.query, "unravel_workload");
      auto u = unravel(lq.query, d, opts);
      UnraveledQuery uq{lq, provenance_to_json(u)};
      uq.labeled.query = std::move(u.query);
      uq.labeled.query.id = lq.query.id;
      level.push_back(std::move(uq));
    }
  }
  return out;
}

void write_workload(const std::filesystem::path& dir, std::span<const LabeledQuery> batch,
                    const KnowledgeGraph& g) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> queries, answers;
  auto names = [&](const AnswerSet& s) {
    nlohmann::json arr = nlohmann::json::array();
    for (auto e : s) arr.push_back(g.entities().name(e));
    return arr;
  };
  for (const auto& lq : batch) {
    queries.push_back(serialize_query(lq.query).dump());
    answers.push_back(nlohmann::json{{"id", lq.query.id},
                                     {"type", to_string(lq.type)},
                                     {"easy", names(lq.easy)},
                                     {"hard", names(lq.hard)}}
                          .dump());
  }
  write_lines(dir / "queries.jsonl", queries);
  write_lines(dir / "answers.jsonl", answers);
}

std::vector<LabeledQuery> read_workload(const std::filesystem::path& queries,
                                        const std::filesystem::path& answers,
                                        const KnowledgeGraph& g) {
  if (!std::filesystem::exists(answers)) {
    fail(ErrorKind::parse, "queries are unlabeled: answers file '" + answers.string() + "' is missing");
  }
  auto qlines = read_lines(queries);
  auto alines = read_lines(answers);
  if (qlines.size() != alines.size()) {
    fail(ErrorKind::parse, "'" + queries.string() + "' and '" + answers.string() +
                               "' have different numbers of records");
  }
  std::vector<LabeledQuery> out;
  out.reserve(qlines.size());
  for (std::size_t i = 0; i < qlines.size(); ++i) {
    LabeledQuery lq;
    lq.query = parse_query(std::string_view(qlines[i]), &g.vocabulary());
    nlohmann::json a;
    try {
      a = nlohmann::json::parse(alines[i]);
      if (a.at("id").get<std::string>() != lq.query.id) {
        fail(ErrorKind::parse, "answers line " + std::to_string(i + 1) + " does not match query id '" +
                                   lq.query.id + "'");
      }
      lq.type = parse_query_type(a.at("type").get<std::string>());
      for (const auto* key : {"easy", "hard"}) {
        auto& set = std::string_view(key) == "easy" ? lq.easy : lq.hard;
        for (const auto& n : a.at(key)) set.push_back(g.entity_id(n.get<std::string>()));
        std::sort(set.begin(), set.end());
        set.erase(std::unique(set.begin(), set.end()), set.end());
      }
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::parse, answers.string() + ":" + std::to_string(i + 1) + ": " + e.what());
    }
    out.push_back(std::move(lq));
  }
  return out;
}

}  // namespace kgq
