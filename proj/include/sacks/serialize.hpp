#pragma once

#include <string>

#include <json.hpp>

#include "sacks/codes.hpp"
#include "sacks/cofinitary.hpp"
#include "sacks/families.hpp"
#include "sacks/formulas.hpp"
#include "sacks/products.hpp"
#include "sacks/trees.hpp"
#include "sacks/words.hpp"

namespace sacks {

using Json = nlohmann::json;

// Trees serialize as the flat list of leaf nodes; the full tree is [""].
Json tree_to_json(const TreeCondition& t);
TreeCondition tree_from_json(const Json& j);

// Products map coordinate indices (as decimal strings) to leaf lists.
Json product_to_json(const ProductCondition& p);
ProductCondition product_from_json(const Json& j);

// Codes: { "depth": K, "entries": [ { "rows": [...], "out": [...] } ] } with
// an optional "output_bound". Loading validates and rejects broken tables.
Json code_to_json(const Code& c);
Code code_from_json(const Json& j);

Json ep_real_to_json(const EPReal& r);
EPReal ep_real_from_json(const Json& j);

Json periodic_set_to_json(const PeriodicSet& s);
PeriodicSet periodic_set_from_json(const Json& j);

// Permutation files give { "threshold", "period", "offsets", "table" }.
Json ea_permutation_to_json(const EAPermutation& p);
EAPermutation ea_permutation_from_json(const Json& j);

Json periodic_tree_to_json(const PeriodicTree& t);
PeriodicTree periodic_tree_from_json(const Json& j);

// { "alphabet": { sym: permutation }, "x": permutation or injection }.
Json representation_to_json(const Representation& rho);
Representation representation_from_json(const Json& j);

Json partial_injection_to_json(const PartialInjection& f);
PartialInjection partial_injection_from_json(const Json& j);

Json backend_to_json(const Backend& b);
Backend backend_from_json(const Json& j, BackendKind kind);

// Family files: { "type": name, "members": [...] }.
Json family_to_json(const std::string& type_name, const FamilyInstance& f);
std::pair<ArithmeticalType, FamilyInstance> family_from_json(const Json& j);

Json verdict_to_json(const Verdict& v);
Json force_verdict_to_json(const ForceVerdict& v);

Json load_json_file(const std::string& path);

}  // namespace sacks
