#include "viewforge/json_io.hpp"

namespace viewforge {

Json term_to_json(const Term& t) {
    switch (t.kind()) {
    case TermKind::Constant: return t.name();
    case TermKind::Variable: return Json{{"var", t.name()}};
    case TermKind::Null: return Json{{"null", t.null_id()}, {"label", t.name()}};
    case TermKind::Pair: return Json::array({term_to_json(t.left()), term_to_json(t.right())});
    }
    return nullptr;
}

Term json_to_term(const Json& j) {
    if (j.is_string()) return Term::constant(j.get<std::string>());
    if (j.is_array()) {
        if (j.size() != 2) throw InputError("pair term must have two components: " + j.dump());
        return Term::pair(json_to_term(j[0]), json_to_term(j[1]));
    }
    if (j.is_object()) {
        if (j.contains("var")) return Term::variable(j.at("var").get<std::string>());
        if (j.contains("null")) return Term::null(j.at("null").get<std::int64_t>(), j.value("label", std::string{}));
    }
    throw InputError("malformed term: " + j.dump());
}

Json atom_to_json(const Atom& a) {
    Json args = Json::array();
    for (const auto& t : a.args) args.push_back(term_to_json(t));
    return Json::array({a.relation, args});
}

Atom json_to_atom(const Json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_string() || !j[1].is_array())
        throw InputError("malformed atom: " + j.dump());
    Atom a;
    a.relation = j[0].get<std::string>();
    for (const auto& t : j[1]) a.args.push_back(json_to_term(t));
    return a;
}

Json instance_to_json(const Instance& i) {
    Json out = Json::array();
    for (const auto& f : i.facts()) out.push_back(atom_to_json(f));
    return out;
}

Instance json_to_instance(const Json& j) {
    if (!j.is_array()) throw InputError("instance must be an array of facts");
    Instance out;
    for (const auto& f : j) out.add(json_to_atom(f));
    return out;
}

Json assignment_to_json(const Assignment& h) {
    Json out = Json::array();
    for (const auto& [from, to] : h) out.push_back(Json::array({term_to_json(from), term_to_json(to)}));
    return out;
}

Assignment json_to_assignment(const Json& j) {
    if (!j.is_array()) throw InputError("assignment must be an array of pairs");
    Assignment out;
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 2) throw InputError("malformed assignment entry: " + e.dump());
        out[json_to_term(e[0])] = json_to_term(e[1]);
    }
    return out;
}

Json tuples_to_json(const TupleSet& tuples) {
    Json out = Json::array();
    for (const auto& t : tuples) {
        Json row = Json::array();
        for (const auto& x : t) row.push_back(term_to_json(x));
        out.push_back(row);
    }
    return out;
}

}  // namespace viewforge
