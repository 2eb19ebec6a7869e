#pragma once

#include <string_view>

#include <nlohmann/json.hpp>

#include "kgq/kg_store.hpp"
#include "kgq/query.hpp"

namespace kgq {

// Query document layout:
//   {"id": "q1", "target": "x",
//    "branches": [[["Friend", "x", "y"], ["Knows", {"const": "Ann"}, "y", {"neg": true}]]]}
// A single branch may be written as "atoms": [...]. Bare strings are
// variables; constants are {"const": "entityName"}.

/// Throws schema errors. When `vocab` is given, relations and constants must
/// resolve against it.
ConjunctiveQuery parse_query(const nlohmann::json& doc, const Vocabulary* vocab = nullptr);
ConjunctiveQuery parse_query(std::string_view text, const Vocabulary* vocab = nullptr);

/// Single-branch queries are written with the "atoms" shorthand.
nlohmann::json serialize_query(const ConjunctiveQuery& q);

nlohmann::json term_to_json(const Term& t);
Term term_from_json(const nlohmann::json& j);

}  // namespace kgq
