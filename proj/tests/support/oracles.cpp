#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>

namespace kgq::testing {

namespace {

std::vector<std::string> vars_of(const ConjunctiveQuery& q) {
  std::set<std::string> s{q.target};
  for (const auto& a : q.atoms()) {
    if (a.subject.is_var()) s.insert(a.subject.name);
    if (a.object.is_var()) s.insert(a.object.name);
  }
  return {s.begin(), s.end()};
}

}  // namespace

bool brute_force_hom_exists(const ConjunctiveQuery& source, const ConjunctiveQuery& dest) {
  std::set<Term> dest_terms{Term::var(dest.target)};
  std::set<std::tuple<std::string, Term, Term>> dest_atoms;
  for (const auto& a : dest.atoms()) {
    dest_terms.insert(a.subject);
    dest_terms.insert(a.object);
    dest_atoms.insert({a.relation, a.subject, a.object});
  }
  const std::vector<Term> images(dest_terms.begin(), dest_terms.end());
  const auto vars = vars_of(source);
  std::map<std::string, Term> h;
  auto img = [&](const Term& t) { return t.is_const() ? t : h.at(t.name); };
  std::function<bool(std::size_t)> go = [&](std::size_t i) -> bool {
    if (i == vars.size()) {
      if (!(h.at(source.target) == Term::var(dest.target))) return false;
      for (const auto& a : source.atoms()) {
        if (!dest_atoms.count({a.relation, img(a.subject), img(a.object)})) return false;
      }
      return true;
    }
    for (const auto& t : images) {
      h[vars[i]] = t;
      if (go(i + 1)) return true;
    }
    return false;
  };
  return go(0);
}

AnswerSet brute_force_answers(const ConjunctiveQuery& q, const KnowledgeGraph& g) {
  const auto vars = vars_of(q);
  std::map<std::string, EntityId> asg;
  std::set<EntityId> answers;
  auto val = [&](const Term& t) -> std::optional<EntityId> {
    if (t.is_var()) return asg.at(t.name);
    return g.entities().find(t.name);
  };
  std::function<void(std::size_t)> go = [&](std::size_t i) {
    if (i == vars.size()) {
      for (const auto& a : q.atoms()) {
        auto r = g.relations().find(a.relation);
        auto s = val(a.subject), o = val(a.object);
        if (!r || !s || !o || !g.contains(*s, *r, *o)) return;
      }
      answers.insert(asg.at(q.target));
      return;
    }
    for (EntityId e = 0; e < g.num_entities(); ++e) {
      asg[vars[i]] = e;
      go(i + 1);
    }
  };
  go(0);
  return {answers.begin(), answers.end()};
}

bool check_valid_path(const ConjunctiveQuery& q, const QueryPath& p) {
  if (!(p.start == Term::var(q.target))) return false;
  Term at = p.start;
  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    const auto& s = p.steps[i];
    if (s.atom >= q.atoms().size()) return false;
    const auto& a = q.atoms()[s.atom];
    const bool ok = s.dir == Direction::fwd ? (a.subject == at && a.object == s.node)
                                            : (a.object == at && a.subject == s.node);
    if (!ok) return false;
    // Immediate return: same atom, and for a self-loop the opposite direction.
    if (i > 0 && p.steps[i - 1].atom == s.atom &&
        (!(a.subject == a.object) || p.steps[i - 1].dir != s.dir)) {
      return false;
    }
    at = s.node;
  }
  return true;
}

std::vector<QueryPath> brute_force_valid_paths(const ConjunctiveQuery& q, int d) {
  const auto& atoms = q.atoms();
  std::vector<QueryPath> out;
  // Enumerate every sequence of (atom, dir) of each length, then filter.
  for (int len = 0; len <= d; ++len) {
    std::vector<std::pair<std::size_t, Direction>> seq(static_cast<std::size_t>(len));
    std::function<void(int)> go = [&](int i) {
      if (i == len) {
        QueryPath p{Term::var(q.target), {}};
        Term at = p.start;
        for (auto [atom, dir] : seq) {
          const auto& a = atoms[atom];
          const Term& from = dir == Direction::fwd ? a.subject : a.object;
          const Term& to = dir == Direction::fwd ? a.object : a.subject;
          if (!(from == at)) return;
          p.steps.push_back({atom, dir, to});
          at = to;
        }
        if (check_valid_path(q, p)) out.push_back(std::move(p));
        return;
      }
      for (std::size_t a = 0; a < atoms.size(); ++a) {
        for (auto dir : {Direction::fwd, Direction::bwd}) {
          seq[static_cast<std::size_t>(i)] = {a, dir};
          go(i + 1);
        }
      }
    };
    go(0);
  }
  std::sort(out.begin(), out.end(), [](const QueryPath& a, const QueryPath& b) {
    return std::lexicographical_compare(
        a.steps.begin(), a.steps.end(), b.steps.begin(), b.steps.end(),
        [](const PathStep& x, const PathStep& y) {
          return std::pair(x.atom, x.dir) < std::pair(y.atom, y.dir);
        });
  });
  return out;
}

std::string tree_canonical_form(const ConjunctiveQuery& q) {
  const auto& atoms = q.atoms();
  std::vector<bool> used(atoms.size(), false);
  // Atoms are consumed as tree edges; constants are leaves.
  std::function<std::string(const Term&)> form = [&](const Term& node) {
    std::vector<std::string> kids;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (used[i]) continue;
      const auto& a = atoms[i];
      const bool down = a.subject == node && node.is_var();
      const bool up = a.object == node && node.is_var();
      if (!down && !up) continue;
      used[i] = true;
      const Term& child = down ? a.object : a.subject;
      std::string label = a.relation + (down ? ">" : "<");
      kids.push_back(label + (child.is_const() ? "'" + child.name + "'" : form(child)));
    }
    std::sort(kids.begin(), kids.end());
    std::string s = "(";
    for (const auto& k : kids) s += k + ",";
    return s + ")";
  };
  auto s = form(Term::var(q.target));
  if (std::find(used.begin(), used.end(), false) != used.end()) return "<not a tree>";
  return s;
}

double counting_rank(const FuzzyEntitySet& scores, EntityId answer, const AnswerSet& all) {
  double higher = 0, ties = 0;
  for (EntityId e = 0; e < scores.size(); ++e) {
    if (std::find(all.begin(), all.end(), e) != all.end()) continue;
    if (scores[e] > scores[answer]) higher += 1;
    if (scores[e] == scores[answer]) ties += 1;
  }
  return 1 + higher + 0.5 * ties;
}

double two_step_spearman(const std::vector<double>& a, const std::vector<double>& b) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      double less = 0, equal = 0;
      for (std::size_t j = 0; j < v.size(); ++j) {
        if (v[j] < v[i]) less += 1;
        if (j != i && v[j] == v[i]) equal += 1;
      }
      r[i] = 1 + less + equal / 2;
    }
    return r;
  };
  auto ra = ranks(a), rb = ranks(b);
  const double n = static_cast<double>(a.size());
  double sa = 0, sb = 0, sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sa += ra[i];
    sb += rb[i];
    sab += ra[i] * rb[i];
    saa += ra[i] * ra[i];
    sbb += rb[i] * rb[i];
  }
  return (n * sab - sa * sb) / std::sqrt((n * saa - sa * sa) * (n * sbb - sb * sb));
}

std::uint64_t digest(const std::string& bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace kgq::testing
