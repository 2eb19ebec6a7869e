#include "kgq/query_json.hpp"

#include <algorithm>

#include "kgq/error.hpp"

namespace kgq {

using nlohmann::json;

namespace {

[[noreturn]] void schema(const std::string& msg) { fail(ErrorKind::schema, msg); }

Atom atom_from_json(const json& j) {
  if (!j.is_array() || (j.size() != 3 && j.size() != 4)) {
    schema("atom must be [relation, subject, object] with an optional {\"neg\": bool}");
  }
  if (!j[0].is_string()) schema("atom relation must be a string");
  Atom a;
  a.relation = j[0].get<std::string>();
  a.subject = term_from_json(j[1]);
  a.object = term_from_json(j[2]);
  if (j.size() == 4) {
    const auto& opts = j[3];
    if (!opts.is_object()) schema("atom options must be an object");
    for (const auto& [key, value] : opts.items()) {
      if (key != "neg") schema("unknown atom option '" + key + "'");
      if (!value.is_boolean()) schema("atom option 'neg' must be a boolean");
      a.negated = value.get<bool>();
    }
  }
  return a;
}

json atom_to_json(const Atom& a) {
  json j = json::array({a.relation, term_to_json(a.subject), term_to_json(a.object)});
  if (a.negated) j.push_back({{"neg", true}});
  return j;
}

std::vector<Atom> branch_from_json(const json& j) {
  if (!j.is_array()) schema("branch must be an array of atoms");
  std::vector<Atom> atoms;
  atoms.reserve(j.size());
  for (const auto& a : j) atoms.push_back(atom_from_json(a));
  return atoms;
}

bool mentions(const std::vector<Atom>& atoms, const std::string& var) {
  return std::any_of(atoms.begin(), atoms.end(), [&](const Atom& a) {
    return (a.subject.is_var() && a.subject.name == var) ||
           (a.object.is_var() && a.object.name == var);
  });
}

}  // namespace

json term_to_json(const Term& t) {
  if (t.is_var()) return t.name;
  return {{"const", t.name}};
}

Term term_from_json(const json& j) {
  if (j.is_string()) {
    auto name = j.get<std::string>();
    if (name.empty()) schema("variable name must be non-empty");
    return Term::var(std::move(name));
  }
  if (j.is_object() && j.size() == 1 && j.contains("const") && j["const"].is_string()) {
    return Term::constant(j["const"].get<std::string>());
  }
  schema("term must be a variable name or {\"const\": \"entity\"}");
}

ConjunctiveQuery parse_query(const json& doc, const Vocabulary* vocab) {
  if (!doc.is_object()) schema("query document must be an object");
  for (const auto& [key, _] : doc.items()) {
    if (key != "id" && key != "target" && key != "branches" && key != "atoms") {
      schema("unknown field '" + key + "'");
    }
  }
  ConjunctiveQuery q;
  if (doc.contains("id")) {
    if (!doc["id"].is_string()) schema("'id' must be a string");
    q.id = doc["id"].get<std::string>();
  }
  if (!doc.contains("target") || !doc["target"].is_string()) schema("missing string 'target'");
  q.target = doc["target"].get<std::string>();
  if (q.target.empty()) schema("'target' must be non-empty");

  const bool has_atoms = doc.contains("atoms");
  const bool has_branches = doc.contains("branches");
  if (has_atoms == has_branches) schema("exactly one of 'atoms' or 'branches' is required");
  q.branches.clear();
  if (has_atoms) {
    q.branches.push_back(branch_from_json(doc["atoms"]));
  } else {
    const auto& bs = doc["branches"];
    if (!bs.is_array() || bs.empty()) schema("'branches' must be a non-empty array");
    for (const auto& b : bs) q.branches.push_back(branch_from_json(b));
  }

  // Only the degenerate target-only query may omit the target from its atoms.
  const bool degenerate = q.branches.size() == 1 && q.branches.front().empty();
  if (!degenerate) {
    for (const auto& b : q.branches) {
      if (!mentions(b, q.target)) schema("target '" + q.target + "' does not occur in every branch");
    }
  }

  if (vocab) {
    for (const auto& b : q.branches) {
      for (const auto& a : b) {
        if (!vocab->relations.find(a.relation)) schema("unknown relation '" + a.relation + "'");
        for (const Term* t : {&a.subject, &a.object}) {
          if (t->is_const() && !vocab->entities.find(t->name)) {
            schema("unknown entity '" + t->name + "'");
          }
        }
      }
    }
  }
  return q;
}

ConjunctiveQuery parse_query(std::string_view text, const Vocabulary* vocab) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::parse, std::string("query JSON: ") + e.what());
  }
  return parse_query(doc, vocab);
}

json serialize_query(const ConjunctiveQuery& q) {
  json doc = json::object();
  if (!q.id.empty()) doc["id"] = q.id;
  doc["target"] = q.target;
  auto branch = [](const std::vector<Atom>& atoms) {
    json arr = json::array();
    for (const auto& a : atoms) arr.push_back(atom_to_json(a));
    return arr;
  };
  if (q.branches.size() == 1) {
    doc["atoms"] = branch(q.branches.front());
  } else {
    json bs = json::array();
    for (const auto& b : q.branches) bs.push_back(branch(b));
    doc["branches"] = std::move(bs);
  }
  return doc;
}

}  // namespace kgq
