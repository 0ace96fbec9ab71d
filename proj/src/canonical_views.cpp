#include "viewforge/canonical_views.hpp"

#include <algorithm>

namespace viewforge {

namespace {

bool contains(const std::vector<Term>& v, const Term& t) { return std::find(v.begin(), v.end(), t) != v.end(); }

const RelationSymbol& symbol(const DSchema& schema, const Atom& a) {
    const auto* sym = schema.find(a.relation);
    if (!sym) throw InputError("unknown relation '" + a.relation + "' in " + a.to_string());
    return *sym;
}

}  // namespace

const SourceVars& SourceVarReport::of(const std::string& source) const {
    for (const auto& s : per_source)
        if (s.source == source) return s;
    throw InputError("unknown source '" + source + "'");
}

SourceVarReport source_vars(const ConjunctiveQuery& q, const DSchema& schema) {
    auto vars = q.variables();
    std::map<Term, std::set<std::string>> owners;
    for (const auto& a : q.atoms) {
        const auto& sym = symbol(schema, a);
        for (const auto& t : a.args)
            if (t.is_variable()) owners[t].insert(sym.sources.begin(), sym.sources.end());
    }
    SourceVarReport out;
    for (const auto& s : schema.sources()) {
        SourceVars sv{s, {}, {}};
        for (const auto& v : vars) {
            const auto& own = owners[v];
            if (!own.count(s)) continue;
            sv.svars.push_back(v);
            if (own.size() > 1) sv.sjvars.push_back(v);
        }
        out.per_source.push_back(std::move(sv));
    }
    return out;
}

std::vector<Atom> source_atoms(const ConjunctiveQuery& q, const std::string& s, const DSchema& schema) {
    std::vector<Atom> out;
    for (const auto& a : q.atoms)
        if (symbol(schema, a).in_source(s)) out.push_back(a);
    return out;
}

std::vector<std::string> sources_of(const ConjunctiveQuery& q, const DSchema& schema) {
    std::vector<std::string> out;
    for (const auto& s : schema.sources())
        if (!source_atoms(q, s, schema).empty()) out.push_back(s);
    return out;
}

View canonical_view(const ConjunctiveQuery& q, const std::string& s, const DSchema& schema) {
    auto atoms = source_atoms(q, s, schema);
    if (atoms.empty()) throw EmptySourceBody(s);
    auto report = source_vars(q, schema);
    const auto& sj = report.of(s).sjvars;
    auto local = variables_of(atoms);
    ConjunctiveQuery v;
    v.name = "V_" + s;
    for (const auto& x : q.variables())
        if (contains(local, x) && (contains(q.free_vars, x) || contains(sj, x))) v.free_vars.push_back(x);
    v.atoms = std::move(atoms);
    return View{v.name, s, std::move(v)};
}

CanonicalContext canonical_context(const ConjunctiveQuery& q, const std::string& s, const DSchema& schema) {
    CanonicalContext out;
    out.source = s;
    out.query.name = "ctx_" + s;
    for (const auto& a : q.atoms)
        if (!symbol(schema, a).in_source(s)) out.query.atoms.push_back(a);
    auto present = variables_of(out.query.atoms);
    auto report = source_vars(q, schema);
    for (const auto& x : report.of(s).sjvars)
        if (contains(present, x)) out.frontier.push_back(x);
    out.query.free_vars = out.frontier;
    out.degenerate = out.query.atoms.empty();
    return out;
}

DView canonical_dview(const ConjunctiveQuery& q, const DSchema& schema, const std::string& name) {
    DView out;
    out.name = name;
    for (const auto& s : sources_of(q, schema)) out.views.push_back(canonical_view(q, s, schema));
    return out;
}

bool is_monadic_frontier(const ConjunctiveQuery& q, const DSchema& schema) {
    auto report = source_vars(q, schema);
    return std::all_of(report.per_source.begin(), report.per_source.end(),
                       [](const SourceVars& s) { return s.sjvars.size() <= 1; });
}

}  // namespace viewforge
