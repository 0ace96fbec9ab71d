#include "viewforge/determinacy.hpp"

#include "viewforge/homomorphism.hpp"

namespace viewforge {

std::string view_relation(const std::string& view) { return "@" + view; }
std::string primed(const std::string& relation) { return relation + "'"; }

std::string to_string(DeterminacyOutcome o) {
    switch (o) {
    case DeterminacyOutcome::Determined: return "Determined";
    case DeterminacyOutcome::NotDetermined: return "NotDetermined";
    case DeterminacyOutcome::Unknown: return "Unknown";
    }
    return "?";
}

namespace {

std::vector<Atom> rename(const std::vector<Atom>& atoms, const std::map<std::string, std::string>& m) {
    std::vector<Atom> out = atoms;
    for (auto& a : out) {
        auto it = m.find(a.relation);
        if (it != m.end()) a.relation = it->second;
    }
    return out;
}

}  // namespace

ViewRuleSet make_view_rules(const DView& dv) {
    ViewRuleSet out;
    for (const auto& v : dv.views) {
        if (!v.is_cq()) throw NonCQView(v.name);
        for (const auto& a : v.cq().atoms) out.prime_map.emplace(a.relation, primed(a.relation));
    }
    for (const auto& v : dv.views) {
        const auto& q = v.cq();
        Atom head{view_relation(v.name), q.free_vars};
        auto body_primed = rename(q.atoms, out.prime_map);
        out.for_view.push_back({"fw_" + v.name, q.atoms, {head}, std::nullopt});
        out.back_view.push_back({"bw_" + v.name, {head}, q.atoms, std::nullopt});
        out.for_view_primed.push_back({"fw'_" + v.name, body_primed, {head}, std::nullopt});
        out.back_view_primed.push_back({"bw'_" + v.name, {head}, body_primed, std::nullopt});
    }
    return out;
}

std::vector<ExistentialRule> prime_rules(std::span<const ExistentialRule> rules,
                                         const std::map<std::string, std::string>& prime_map) {
    std::map<std::string, std::string> full = prime_map;
    for (const auto& r : rules) {
        for (const auto& a : r.body) full.emplace(a.relation, primed(a.relation));
        for (const auto& a : r.head) full.emplace(a.relation, primed(a.relation));
    }
    std::vector<ExistentialRule> out;
    for (const auto& r : rules) {
        ExistentialRule p = r;
        p.name = r.name + "'";
        p.body = rename(r.body, full);
        p.head = rename(r.head, full);
        out.push_back(std::move(p));
    }
    return out;
}

Instance unprime(const Instance& i, const std::map<std::string, std::string>& prime_map) {
    std::map<std::string, std::string> back;
    for (const auto& [rel, p] : prime_map) back[p] = rel;
    Instance out;
    for (const auto& [rel, tuples] : i.relations()) {
        auto it = back.find(rel);
        if (it == back.end()) continue;
        for (const auto& t : tuples) out.add(it->second, t);
    }
    return out;
}

DeterminacyVerdict check_determinacy(const ConjunctiveQuery& q, const DView& dv, std::span<const ExistentialRule> rules,
                                     const DeterminacyConfig& cfg) {
    q.check();
    ViewRuleSet vr = make_view_rules(dv);
    for (const auto& a : q.atoms) vr.prime_map.emplace(a.relation, primed(a.relation));
    for (const auto& r : rules) {
        for (const auto& a : r.body) vr.prime_map.emplace(a.relation, primed(a.relation));
        for (const auto& a : r.head) vr.prime_map.emplace(a.relation, primed(a.relation));
    }
    auto rules_primed = prime_rules(rules, vr.prime_map);
    std::vector<Atom> q_primed = rename(q.atoms, vr.prime_map);
    Assignment pinned;
    for (const auto& v : q.free_vars) pinned[v] = frozen(v);

    std::set<std::string> original;
    for (const auto& [rel, p] : vr.prime_map) original.insert(rel);

    DeterminacyVerdict out;
    NullPool pool;
    auto chase = [&](const Instance& start, std::span<const ExistentialRule> rs, const std::string& prefix,
                     bool& ok) {
        if (rs.empty()) return start;
        ChaseConfig cc{cfg.fuel, prefix};
        auto res = run_chase(start, rs, cc, &pool);
        if (!res.completed) ok = false;
        return std::move(res.instance);
    };

    bool ok = true;
    Instance f0 = chase(build_canondb(q), rules, "s", ok);
    if (!ok) {
        out.reason = "chase of the query under the rules ran out of fuel";
        return out;
    }
    for (std::size_t round = 1; round <= cfg.max_rounds; ++round) {
        std::string r = "r" + std::to_string(round);
        RoundSnapshot snap;
        snap.f0 = f0;
        Instance f1 = chase(f0, vr.for_view, r + "a", ok);
        Instance f2 = chase(f1, vr.back_view_primed, r + "b", ok);
        if (!rules_primed.empty()) f2 = chase(f2, rules_primed, r + "c", ok);
        snap.f1_size = f1.size();
        snap.f2 = f2;
        if (!ok) {
            out.rounds.push_back(std::move(snap));
            out.round = round;
            out.reason = "chase ran out of fuel in round " + std::to_string(round);
            return out;
        }
        if (auto h = find_homomorphism(q_primed, f2, pinned)) {
            out.rounds.push_back(std::move(snap));
            out.outcome = DeterminacyOutcome::Determined;
            out.round = round;
            out.match = *h;
            return out;
        }
        Instance f3 = chase(f2, vr.for_view_primed, r + "d", ok);
        Instance f4 = chase(f3, vr.back_view, r + "e", ok);
        if (!rules.empty()) f4 = chase(f4, rules, r + "f", ok);
        Instance f5 = f4.filter([&](const std::string& rel) { return original.count(rel) > 0; });
        snap.f3_size = f3.size();
        snap.f4_size = f4.size();
        snap.f5_size = f5.size();
        out.rounds.push_back(std::move(snap));
        if (!ok) {
            out.round = round;
            out.reason = "chase ran out of fuel in round " + std::to_string(round);
            return out;
        }
        f5.add_all(f0);
        if (f5 == f0) {
            out.outcome = DeterminacyOutcome::NotDetermined;
            out.round = round;
            out.fixpoint = f0;
            out.witness_left = f0;
            out.witness_right = unprime(f2, vr.prime_map);
            return out;
        }
        f0 = std::move(f5);
    }
    out.round = cfg.max_rounds;
    out.reason = "no verdict after " + std::to_string(cfg.max_rounds) + " rounds";
    return out;
}

std::string validate_determinacy_witness(const ConjunctiveQuery& q, const DView& dv, const Instance& left,
                                         const Instance& right, std::span<const ExistentialRule> rules) {
    if (!rules.empty()) {
        if (!satisfies(left, rules)) return "left instance violates the rules";
        if (!satisfies(right, rules)) return "right instance violates the rules";
    }
    auto dom = active_domain(left);
    auto rd = active_domain(right);
    dom.insert(rd.begin(), rd.end());
    dom = padded_domain(dom, max_arity(dv));
    if (view_images(dv, left, &dom) != view_images(dv, right, &dom)) return "view images differ";
    if (enumerate_matches(q, left) == enumerate_matches(q, right)) return "query answers coincide";
    return {};
}

}  // namespace viewforge
