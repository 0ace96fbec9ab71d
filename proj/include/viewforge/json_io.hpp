#pragma once

#include <json.hpp>

#include "viewforge/homomorphism.hpp"
#include "viewforge/model.hpp"

namespace viewforge {

using Json = nlohmann::ordered_json;

// Constants are strings, pairs nested two-element arrays, nulls
// {"null": id, "label": ...} and variables {"var": name}.
Json term_to_json(const Term& t);
Term json_to_term(const Json& j);

/// ["R", [args...]]
Json atom_to_json(const Atom& a);
Atom json_to_atom(const Json& j);

Json instance_to_json(const Instance& i);
Instance json_to_instance(const Json& j);

/// [[from, to], ...]
Json assignment_to_json(const Assignment& h);
Assignment json_to_assignment(const Json& j);

Json tuples_to_json(const TupleSet& tuples);

}  // namespace viewforge
