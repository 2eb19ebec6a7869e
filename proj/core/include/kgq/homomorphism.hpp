#pragma once

#include <map>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "kgq/query.hpp"

namespace kgq {

/// Map from the source query's variables to terms of the destination query.
/// Constants are fixed points and are not stored.
struct Homomorphism {
  std::map<std::string, Term> mapping;

  Term image(const Term& t) const;
  /// {"var": "image", ...}; constant images are written as {"const": name}.
  nlohmann::json to_json() const;

  bool operator==(const Homomorphism&) const = default;
};

/// Searches for a homomorphism from `source` to `dest`: target to target,
/// constants to themselves, every source atom onto a dest atom. The search is
/// complete. Both queries must be pure.
std::optional<Homomorphism> find_homomorphism(const ConjunctiveQuery& source,
                                              const ConjunctiveQuery& dest);

/// Atom-by-atom check of a candidate mapping. Unmapped source variables fail.
bool verify_homomorphism(const ConjunctiveQuery& source, const ConjunctiveQuery& dest,
                         const Homomorphism& h);

/// q ⊆ q_prime, decided by a homomorphism from q_prime into q.
bool is_contained(const ConjunctiveQuery& q, const ConjunctiveQuery& q_prime);

}  // namespace kgq
