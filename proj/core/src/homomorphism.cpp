#include "kgq/homomorphism.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "kgq/error.hpp"
#include "kgq/query_json.hpp"

namespace kgq {

Term Homomorphism::image(const Term& t) const {
  if (t.is_const()) return t;
  auto it = mapping.find(t.name);
  if (it == mapping.end()) fail(ErrorKind::argument, "variable '" + t.name + "' is unmapped");
  return it->second;
}

nlohmann::json Homomorphism::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [var, img] : mapping) j[var] = term_to_json(img);
  return j;
}

namespace {

class Bitset {
 public:
  Bitset() = default;
  explicit Bitset(std::size_t n, bool value = false)
      : n_(n), words_((n + 63) / 64, value ? ~std::uint64_t{0} : 0) {
    if (value && n % 64) words_.back() &= (std::uint64_t{1} << (n % 64)) - 1;
  }
  bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1U; }
  void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
  void reset(std::size_t i) { words_[i / 64] &= ~(std::uint64_t{1} << (i % 64)); }
  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += std::popcount(w);
    return c;
  }
  bool none() const {
    return std::all_of(words_.begin(), words_.end(), [](auto w) { return w == 0; });
  }
  void intersect(const Bitset& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
  }
  template <typename F>
  void for_each(F&& f) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      for (auto bits = words_[w]; bits; bits &= bits - 1) {
        f(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
      }
    }
  }
  std::size_t size() const { return n_; }

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

// Source term after binding: a source variable index or a fixed dest term.
struct Slot {
  bool is_var = false;
  std::uint32_t index = 0;
};

struct Binary {
  std::uint32_t rel;
  std::uint32_t subj;  // source variable
  std::uint32_t obj;   // source variable
};

class Search {
 public:
  Search(const ConjunctiveQuery& source, const ConjunctiveQuery& dest)
      : source_(source), dest_(dest) {}

  std::optional<Homomorphism> run() {
    if (!index_dest()) return std::nullopt;
    if (!bind_source()) return std::nullopt;
    if (!arc_consistency()) return std::nullopt;
    assignment_.assign(vars_.size(), kUnassigned);
    if (!solve(0)) return std::nullopt;
    Homomorphism h;
    for (std::size_t v = 0; v < vars_.size(); ++v) h.mapping.emplace(vars_[v], terms_[assignment_[v]]);
    return h;
  }

 private:
  static constexpr std::uint32_t kUnassigned = ~std::uint32_t{0};

  std::uint64_t key(std::uint32_t rel, std::uint32_t s, std::uint32_t o) const {
    return (static_cast<std::uint64_t>(rel) * terms_.size() + s) * terms_.size() + o;
  }
  const std::vector<std::uint32_t>& adjacent(std::uint32_t rel, std::uint32_t t, bool fwd) const {
    static const std::vector<std::uint32_t> empty;
    auto& m = fwd ? fwd_ : bwd_;
    auto it = m.find(static_cast<std::uint64_t>(rel) * terms_.size() + t);
    return it == m.end() ? empty : it->second;
  }

  bool index_dest() {
    auto intern = [&](const Term& t) {
      auto [it, inserted] = term_ids_.emplace(t, static_cast<std::uint32_t>(terms_.size()));
      if (inserted) terms_.push_back(t);
      return it->second;
    };
    dest_target_ = intern(Term::var(dest_.target));
    for (const auto& a : dest_.atoms()) {
      intern(a.subject);
      intern(a.object);
      rel_ids_.emplace(a.relation, static_cast<std::uint32_t>(rel_ids_.size()));
    }
    for (const auto& a : dest_.atoms()) {
      auto r = rel_ids_.at(a.relation);
      auto s = term_ids_.at(a.subject);
      auto o = term_ids_.at(a.object);
      if (atoms_.insert(key(r, s, o)).second) {
        fwd_[static_cast<std::uint64_t>(r) * terms_.size() + s].push_back(o);
        bwd_[static_cast<std::uint64_t>(r) * terms_.size() + o].push_back(s);
      }
    }
    return true;
  }

  bool bind_source() {
    std::unordered_map<std::string, std::uint32_t> var_index;
    vars_ = source_.variables();
    for (std::uint32_t i = 0; i < vars_.size(); ++i) var_index.emplace(vars_[i], i);
    domains_.assign(vars_.size(), Bitset(terms_.size(), true));
    domains_[0] = Bitset(terms_.size());
    domains_[0].set(dest_target_);
    neighbors_.assign(vars_.size(), {});

    auto slot = [&](const Term& t) -> std::optional<Slot> {
      if (t.is_var()) return Slot{true, var_index.at(t.name)};
      auto it = term_ids_.find(t);
      if (it == term_ids_.end()) return std::nullopt;
      return Slot{false, it->second};
    };
    for (const auto& a : source_.atoms()) {
      auto rit = rel_ids_.find(a.relation);
      if (rit == rel_ids_.end()) return false;
      auto s = slot(a.subject);
      auto o = slot(a.object);
      if (!s || !o) return false;  // constant absent from dest
      const auto r = rit->second;
      if (!s->is_var && !o->is_var) {
        if (!atoms_.count(key(r, s->index, o->index))) return false;
      } else if (s->is_var && o->is_var && s->index == o->index) {
        Bitset keep(terms_.size());
        domains_[s->index].for_each([&](std::size_t t) {
          auto ti = static_cast<std::uint32_t>(t);
          if (atoms_.count(key(r, ti, ti))) keep.set(t);
        });
        domains_[s->index].intersect(keep);
      } else if (s->is_var && o->is_var) {
        binaries_.push_back({r, s->index, o->index});
        neighbors_[s->index].push_back(binaries_.size() - 1);
        neighbors_[o->index].push_back(binaries_.size() - 1);
      } else if (s->is_var) {
        Bitset keep(terms_.size());
        for (auto t : adjacent(r, o->index, false)) keep.set(t);
        domains_[s->index].intersect(keep);
      } else {
        Bitset keep(terms_.size());
        for (auto t : adjacent(r, s->index, true)) keep.set(t);
        domains_[o->index].intersect(keep);
      }
    }
    return std::none_of(domains_.begin(), domains_.end(), [](const Bitset& d) { return d.none(); });
  }

  // Removes values of `var` without support through constraint `c`.
  bool revise(std::vector<Bitset>& domains, const Binary& c, bool revise_subject) const {
    auto& d = domains[revise_subject ? c.subj : c.obj];
    const auto& other = domains[revise_subject ? c.obj : c.subj];
    bool changed = false;
    d.for_each([&](std::size_t t) {
      const auto& adj = adjacent(c.rel, static_cast<std::uint32_t>(t), revise_subject);
      bool supported = std::any_of(adj.begin(), adj.end(), [&](auto u) { return other.test(u); });
      if (!supported) {
        d.reset(t);
        changed = true;
      }
    });
    return changed;
  }

  bool arc_consistency() {
    std::vector<std::pair<std::size_t, bool>> queue;
    for (std::size_t c = 0; c < binaries_.size(); ++c) {
      queue.emplace_back(c, true);
      queue.emplace_back(c, false);
    }
    while (!queue.empty()) {
      auto [c, subj] = queue.back();
      queue.pop_back();
      const auto& con = binaries_[c];
      if (!revise(domains_, con, subj)) continue;
      auto var = subj ? con.subj : con.obj;
      if (domains_[var].none()) return false;
      for (auto other : neighbors_[var]) {
        if (other == c) continue;
        const auto& oc = binaries_[other];
        // Re-check the far end of every other constraint touching `var`.
        if (oc.subj == var) queue.emplace_back(other, false);
        if (oc.obj == var) queue.emplace_back(other, true);
      }
    }
    return true;
  }

  std::uint32_t pick_variable(const std::vector<Bitset>& domains) const {
    std::uint32_t best = kUnassigned;
    std::tuple<bool, std::size_t, std::size_t> best_key{};
    for (std::uint32_t v = 0; v < vars_.size(); ++v) {
      if (assignment_[v] != kUnassigned) continue;
      std::size_t assigned_nbrs = 0;
      for (auto c : neighbors_[v]) {
        const auto& con = binaries_[c];
        auto other = con.subj == v ? con.obj : con.subj;
        if (assignment_[other] != kUnassigned) ++assigned_nbrs;
      }
      // Connected first, then smallest domain, then most assigned neighbours.
      std::tuple<bool, std::size_t, std::size_t> k{assigned_nbrs == 0, domains[v].count(),
                                                  ~assigned_nbrs};
      if (best == kUnassigned || k < best_key) {
        best = v;
        best_key = k;
      }
    }
    return best;
  }

  // Forward-checking backtracking. Domains are narrowed in place and the
  // previous values are restored from trail_ on backtrack.
  bool solve(std::size_t depth) {
    if (depth == vars_.size()) return true;
    auto v = pick_variable(domains_);
    std::vector<std::uint32_t> candidates;
    domains_[v].for_each([&](std::size_t t) { candidates.push_back(static_cast<std::uint32_t>(t)); });
    for (auto value : candidates) {
      const std::size_t mark = trail_.size();
      if (narrow(v, value)) {
        assignment_[v] = value;
        if (solve(depth + 1)) return true;
        assignment_[v] = kUnassigned;
      }
      while (trail_.size() > mark) {
        domains_[trail_.back().first] = std::move(trail_.back().second);
        trail_.pop_back();
      }
    }
    return false;
  }

  bool narrow(std::uint32_t v, std::uint32_t value) {
    for (auto c : neighbors_[v]) {
      const auto& con = binaries_[c];
      const bool v_is_subj = con.subj == v;
      auto other = v_is_subj ? con.obj : con.subj;
      if (assignment_[other] != kUnassigned) {
        auto s = v_is_subj ? value : assignment_[other];
        auto o = v_is_subj ? assignment_[other] : value;
        if (!atoms_.count(key(con.rel, s, o))) return false;
        continue;
      }
      if (other == v) continue;
      Bitset keep(terms_.size());
      for (auto u : adjacent(con.rel, value, v_is_subj)) keep.set(u);
      trail_.emplace_back(other, domains_[other]);
      domains_[other].intersect(keep);
      if (domains_[other].none()) return false;
    }
    trail_.emplace_back(v, domains_[v]);
    domains_[v] = Bitset(terms_.size());
    domains_[v].set(value);
    return true;
  }

  const ConjunctiveQuery& source_;
  const ConjunctiveQuery& dest_;

  std::vector<Term> terms_;
  std::map<Term, std::uint32_t> term_ids_;
  std::unordered_map<std::string, std::uint32_t> rel_ids_;
  std::unordered_set<std::uint64_t> atoms_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> fwd_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> bwd_;
  std::uint32_t dest_target_ = 0;

  std::vector<std::string> vars_;
  std::vector<Bitset> domains_;
  std::vector<Binary> binaries_;
  std::vector<std::vector<std::size_t>> neighbors_;
  std::vector<std::uint32_t> assignment_;
  std::vector<std::pair<std::uint32_t, Bitset>> trail_;
};

}  // namespace

std::optional<Homomorphism> find_homomorphism(const ConjunctiveQuery& source,
                                              const ConjunctiveQuery& dest) {
  require_pure(source, "find_homomorphism");
  require_pure(dest, "find_homomorphism");
  return Search(source, dest).run();
}

bool verify_homomorphism(const ConjunctiveQuery& source, const ConjunctiveQuery& dest,
                         const Homomorphism& h) {
  auto target_it = h.mapping.find(source.target);
  if (target_it == h.mapping.end() || target_it->second != Term::var(dest.target)) return false;
  std::set<std::tuple<std::string, Term, Term>> dest_atoms;
  for (const auto& a : dest.atoms()) dest_atoms.emplace(a.relation, a.subject, a.object);
  for (const auto& a : source.atoms()) {
    for (const Term* t : {&a.subject, &a.object}) {
      if (t->is_var() && !h.mapping.count(t->name)) return false;
    }
    if (!dest_atoms.count({a.relation, h.image(a.subject), h.image(a.object)})) return false;
  }
  return true;
}

bool is_contained(const ConjunctiveQuery& q, const ConjunctiveQuery& q_prime) {
  return find_homomorphism(q_prime, q).has_value();
}

}  // namespace kgq
