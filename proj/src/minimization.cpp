#include "viewforge/minimization.hpp"

#include <algorithm>

namespace viewforge {

std::string to_string(Tri t) {
    switch (t) {
    case Tri::Yes: return "Yes";
    case Tri::No: return "No";
    case Tri::Unknown: return "Unknown";
    }
    return "?";
}

namespace {

Assignment pin_free(const ConjunctiveQuery& from, const std::vector<Term>& to_free) {
    Assignment pinned;
    for (std::size_t i = 0; i < from.free_vars.size(); ++i) pinned[from.free_vars[i]] = frozen(to_free[i]);
    return pinned;
}

std::optional<Assignment> fold_into(const ConjunctiveQuery& q, const std::vector<Atom>& sub) {
    auto h = find_homomorphism(q.atoms, build_canondb(sub), pin_free(q, q.free_vars));
    if (!h) return std::nullopt;
    std::map<Term, Term> thaw;
    for (const auto& v : variables_of(sub)) thaw[frozen(v)] = v;
    Assignment out;
    for (const auto& [from, to] : *h) {
        auto it = thaw.find(to);
        out[from] = it == thaw.end() ? to : it->second;
    }
    return out;
}

std::vector<Atom> dedupe(const std::vector<Atom>& atoms) {
    std::vector<Atom> out;
    for (const auto& a : atoms)
        if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
    return out;
}

bool keeps_free_vars(const ConjunctiveQuery& q, const std::vector<Atom>& sub) {
    auto vars = variables_of(sub);
    return std::all_of(q.free_vars.begin(), q.free_vars.end(),
                       [&](const Term& v) { return std::find(vars.begin(), vars.end(), v) != vars.end(); });
}

}  // namespace

MinimalityReport is_minimal(const ConjunctiveQuery& q) {
    MinimalityReport out;
    auto atoms = dedupe(q.atoms);
    if (atoms.size() < q.atoms.size()) {
        out.minimal = false;
        Assignment id;
        for (const auto& v : q.variables()) id[v] = v;
        out.folding = id;
        out.subquery = ConjunctiveQuery{q.name, q.free_vars, atoms};
        return out;
    }
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        std::vector<Atom> sub = atoms;
        sub.erase(sub.begin() + static_cast<std::ptrdiff_t>(i));
        if (sub.empty() || !keeps_free_vars(q, sub)) continue;
        if (auto h = fold_into(q, sub)) {
            out.minimal = false;
            out.folding = *h;
            out.subquery = ConjunctiveQuery{q.name, q.free_vars, sub};
            return out;
        }
    }
    return out;
}

ConjunctiveQuery minimize(const ConjunctiveQuery& q) {
    ConjunctiveQuery cur{q.name, q.free_vars, dedupe(q.atoms)};
    std::size_t i = 0;
    while (i < cur.atoms.size()) {
        std::vector<Atom> sub = cur.atoms;
        sub.erase(sub.begin() + static_cast<std::ptrdiff_t>(i));
        if (!sub.empty() && keeps_free_vars(cur, sub) && fold_into(cur, sub)) {
            cur.atoms = std::move(sub);
        } else {
            ++i;
        }
    }
    return cur;
}

Tri entails_under_rules(const ConjunctiveQuery& q, const ConjunctiveQuery& q2, std::span<const ExistentialRule> rules,
                        const ChaseConfig& cfg) {
    if (q.free_vars.size() != q2.free_vars.size()) return Tri::No;
    auto chased = run_chase(build_canondb(q), rules, cfg);
    if (find_homomorphism(q2.atoms, chased.instance, pin_free(q2, q.free_vars))) return Tri::Yes;
    return chased.completed ? Tri::No : Tri::Unknown;
}

Tri equivalent_under_rules(const ConjunctiveQuery& q, const ConjunctiveQuery& q2,
                           std::span<const ExistentialRule> rules, const ChaseConfig& cfg) {
    Tri a = entails_under_rules(q, q2, rules, cfg);
    if (a == Tri::No) return Tri::No;
    Tri b = entails_under_rules(q2, q, rules, cfg);
    if (b == Tri::No) return Tri::No;
    return (a == Tri::Yes && b == Tri::Yes) ? Tri::Yes : Tri::Unknown;
}

std::optional<ConjunctiveQuery> minimize_under_rules(const ConjunctiveQuery& q, std::span<const ExistentialRule> rules,
                                                     const ChaseConfig& cfg) {
    if (rules.empty()) return minimize(q);
    ConjunctiveQuery cur{q.name, q.free_vars, dedupe(q.atoms)};
    std::size_t i = 0;
    while (i < cur.atoms.size()) {
        ConjunctiveQuery sub = cur;
        sub.atoms.erase(sub.atoms.begin() + static_cast<std::ptrdiff_t>(i));
        if (sub.atoms.empty() || !keeps_free_vars(cur, sub.atoms)) {
            ++i;
            continue;
        }
        switch (entails_under_rules(sub, cur, rules, cfg)) {
        case Tri::Yes: cur = std::move(sub); break;
        case Tri::No: ++i; break;
        case Tri::Unknown: return std::nullopt;
        }
    }
    return cur;
}

}  // namespace viewforge
