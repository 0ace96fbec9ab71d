#include "viewforge/disclosure.hpp"

#include <algorithm>

#include "viewforge/canonical_views.hpp"
#include "viewforge/homomorphism.hpp"

namespace viewforge {

Term critical_element() { return Term::constant("*"); }

Instance critical_facts(const DSchema& schema) {
    Instance out;
    for (const auto& r : schema.relations()) out.add(r.name, Tuple(r.arity, critical_element()));
    return out;
}

DInstance critical_instance(const DSchema& schema) { return DInstance::distribute(schema, critical_facts(schema)); }

std::string to_string(DisclosureOutcome o) {
    switch (o) {
    case DisclosureOutcome::Disclosing: return "Disclosing";
    case DisclosureOutcome::NonDisclosing: return "NonDisclosing";
    case DisclosureOutcome::Unknown: return "Unknown";
    }
    return "?";
}

namespace {

Assignment star_pins(const ConjunctiveQuery& p) {
    Assignment pinned;
    for (const auto& v : p.free_vars) pinned[v] = critical_element();
    return pinned;
}

Instance promote_nulls(const Instance& i) {
    Instance out;
    for (const auto& [rel, tuples] : i.relations())
        for (const auto& t : tuples) {
            Tuple u = t;
            for (auto& x : u)
                if (x.is_null()) x = Term::constant("#w" + std::to_string(x.null_id()));
            out.add(rel, std::move(u));
        }
    return out;
}

struct CriticalChase {
    Instance instance;
    bool ok = true;
    std::string reason;
};

CriticalChase critical_chase(const DView& dv, const DSchema& schema, std::span<const ExistentialRule> rules,
                             const ChaseConfig& cfg) {
    CriticalChase out;
    const Term star = critical_element();
    Instance crit = critical_facts(schema);
    NullPool pool;
    std::vector<TupleSet> images;
    for (const auto& v : dv.views) images.push_back(eval_view(v, crit));

    for (std::size_t k = 0; k < dv.views.size(); ++k) {
        const auto& q = dv.views[k].cq();
        for (const auto& t : images[k]) {
            std::map<Term, Term> bind;
            for (std::size_t i = 0; i < q.free_vars.size(); ++i) bind[q.free_vars[i]] = t[i];
            for (const auto& y : q.existential_vars())
                bind[y] = pool.fresh("n_" + dv.views[k].name + "_" + y.name());
            for (const auto& a : substitute(q.atoms, bind)) out.instance.add(a);
        }
    }

    while (true) {
        bool changed = false;
        if (!rules.empty()) {
            ChaseResult res;
            try {
                res = run_chase(out.instance, rules, cfg, &pool);
            } catch (const EqualityClash& e) {
                out.ok = false;
                out.reason = e.what();
                return out;
            }
            if (!res.completed) {
                out.ok = false;
                out.reason = "rule chase ran out of fuel";
                return out;
            }
            if (!(res.instance == out.instance)) {
                out.instance = std::move(res.instance);
                changed = true;
            }
        }
        std::optional<Term> merge;
        for (std::size_t k = 0; k < dv.views.size() && !merge && out.ok; ++k) {
            const auto& q = dv.views[k].cq();
            for_each_homomorphism(q.atoms, out.instance, {}, {}, [&](const Assignment& h) {
                Tuple head;
                for (const auto& x : q.free_vars) head.push_back(h.at(x));
                if (images[k].count(head)) return true;
                if (images[k].empty()) {
                    out.ok = false;
                    out.reason = "view " + dv.views[k].name + " is empty on the critical instance but matches";
                    return false;
                }
                for (const auto& x : head) {
                    if (x == star) continue;
                    if (x.is_null()) {
                        merge = x;
                        return false;
                    }
                    out.ok = false;
                    out.reason = "view " + dv.views[k].name + " would expose " + x.to_string();
                    return false;
                }
                return true;
            });
        }
        if (!out.ok) return out;
        if (merge) {
            out.instance = out.instance.substitute(*merge, star);
            changed = true;
        }
        if (!changed) return out;
    }
}

}  // namespace

DisclosureVerdict check_un_disclosure_cq(const DView& dv, const ConjunctiveQuery& p, const DSchema& schema,
                                         std::span<const ExistentialRule> rules, const ChaseConfig& cfg) {
    for (const auto& v : dv.views)
        if (!v.is_cq()) throw InputError("view '" + v.name + "' is not a CQ; use the oracle instead");
    DisclosureVerdict out;
    auto cc = critical_chase(dv, schema, rules, cfg);
    out.certificate = cc.instance;
    if (!cc.ok) {
        out.reason = cc.reason;
        return out;
    }
    if (auto h = find_homomorphism(p.atoms, cc.instance, star_pins(p))) {
        out.outcome = DisclosureOutcome::Disclosing;
        out.secret_match = *h;
        return out;
    }
    out.witness = promote_nulls(cc.instance);
    auto problem = validate_nondisclosure_witness(dv, p, schema, out.witness, rules);
    if (!problem.empty()) {
        out.reason = "witness rejected: " + problem;
        return out;
    }
    out.outcome = DisclosureOutcome::NonDisclosing;
    return out;
}

std::string validate_nondisclosure_witness(const DView& dv, const ConjunctiveQuery& p, const DSchema& schema,
                                           const Instance& witness, std::span<const ExistentialRule> rules) {
    for (const auto& [rel, tuples] : witness.relations()) {
        const auto* sym = schema.find(rel);
        if (!sym) return "unknown relation " + rel;
        for (const auto& t : tuples)
            if (t.size() != sym->arity) return "wrong arity in " + rel;
    }
    if (!rules.empty() && !satisfies(witness, rules)) return "witness violates the rules";
    Instance crit = critical_facts(schema);
    auto dom = active_domain(witness);
    dom.insert(critical_element());
    dom = padded_domain(dom, max_arity(dv));
    if (view_images(dv, witness, &dom) != view_images(dv, crit, &dom)) return "view image differs from the critical one";
    if (find_homomorphism(p.atoms, witness, star_pins(p))) return "secret holds on the witness";
    return {};
}

UsefulNonDisclosing exists_useful_nondisclosing_cq(const ConjunctiveQuery& q, const ConjunctiveQuery& p,
                                                   const DSchema& schema, std::span<const ExistentialRule> rules,
                                                   const ChaseConfig& cfg) {
    UsefulNonDisclosing out;
    if (!q.is_boolean()) throw InputError("utility query must be Boolean");
    if (p.is_boolean() && entails_under_rules(q, p, rules, cfg) == Tri::Yes) {
        out.answer = Tri::No;
        out.reason = "the secret is implied by the utility query";
        out.minimized = q;
        return out;
    }
    auto m = minimize_under_rules(q, rules, cfg);
    if (!m) {
        out.reason = "minimization under the rules ran out of fuel";
        return out;
    }
    out.minimized = *m;
    out.design = canonical_dview(*m, schema);

    bool replicated = std::any_of(m->atoms.begin(), m->atoms.end(),
                                  [&](const Atom& a) { return schema.at(a.relation).replicated(); });
    auto direct = check_un_disclosure_cq(out.design, p, schema, rules, cfg);
    out.direct = direct.outcome;
    out.direct_verdict = direct;

    bool any_nd = false;
    bool any_unknown = false;
    bool p_replicated = std::any_of(p.atoms.begin(), p.atoms.end(),
                                    [&](const Atom& a) { return schema.at(a.relation).replicated(); });
    if (!replicated && !p_replicated && p.is_boolean()) {
        for (const auto& s : sources_of(p, schema)) {
            SourceSecretVerdict sv;
            sv.source = s;
            sv.secret_part = canonical_view(p, s, schema).cq();
            sv.secret_part.name = p.name + "_" + s;
            sv.verdict = check_un_disclosure_cq(out.design, sv.secret_part, schema, rules, cfg);
            any_nd = any_nd || sv.verdict.outcome == DisclosureOutcome::NonDisclosing;
            any_unknown = any_unknown || sv.verdict.outcome == DisclosureOutcome::Unknown;
            out.per_source.push_back(std::move(sv));
        }
        if (direct.outcome != DisclosureOutcome::Unknown && !any_unknown)
            out.decomposition_consistent = (direct.outcome == DisclosureOutcome::NonDisclosing) == any_nd;
    } else {
        any_nd = direct.outcome == DisclosureOutcome::NonDisclosing;
        any_unknown = direct.outcome == DisclosureOutcome::Unknown;
    }

    if (any_nd) {
        out.answer = Tri::Yes;
        out.reason = "the canonical d-view of the minimized query does not disclose the secret";
    } else if (any_unknown) {
        out.reason = "a disclosure check was inconclusive";
    } else if (replicated) {
        out.reason = "canonical views disclose the secret, but with replication they need not be minimally informative";
    } else {
        out.answer = Tri::No;
        out.reason = "the canonical d-view of the minimized query discloses the secret";
    }
    return out;
}

}  // namespace viewforge
