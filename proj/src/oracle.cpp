#include "viewforge/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "viewforge/canonical_views.hpp"
#include "viewforge/chase.hpp"
#include "viewforge/homomorphism.hpp"

namespace viewforge {

std::vector<Term> oracle_domain(std::size_t k) {
    std::vector<Term> out;
    for (std::size_t i = 1; i <= k; ++i) out.push_back(Term::constant("d" + std::to_string(i)));
    return out;
}

std::vector<RelationSymbol> oracle_relations(const DSchema& schema, const std::string& source) {
    if (source.empty()) return schema.relations();
    return schema.relations_of(source);
}

namespace {

std::vector<Tuple> all_tuples(std::size_t arity, const std::vector<Term>& dom) {
    std::vector<Tuple> out;
    if (arity > 0 && dom.empty()) return out;
    Tuple t(arity);
    std::vector<std::size_t> idx(arity, 0);
    while (true) {
        for (std::size_t i = 0; i < arity; ++i) t[i] = dom[idx[i]];
        out.push_back(t);
        std::size_t k = arity;
        while (k > 0 && idx[k - 1] + 1 == dom.size()) idx[--k] = 0;
        if (k == 0) break;
        ++idx[k - 1];
    }
    return out;
}

// Subsets of size <= m, by size then lexicographically.
std::vector<std::vector<Tuple>> subsets(const std::vector<Tuple>& items, std::size_t m) {
    std::vector<std::vector<Tuple>> out;
    std::vector<Tuple> cur;
    for (std::size_t size = 0; size <= std::min(m, items.size()); ++size) {
        std::function<void(std::size_t)> rec = [&](std::size_t from) {
            if (cur.size() == size) {
                out.push_back(cur);
                return;
            }
            for (std::size_t i = from; i + (size - cur.size()) <= items.size(); ++i) {
                cur.push_back(items[i]);
                rec(i + 1);
                cur.pop_back();
            }
        };
        rec(0);
    }
    return out;
}

std::set<Term> image_domain(const DView& dv, std::size_t k) {
    auto dom = oracle_domain(k);
    return padded_domain(std::set<Term>(dom.begin(), dom.end()), max_arity(dv));
}

std::vector<std::vector<TupleSet>> all_images(const DView& dv, const std::vector<Instance>& insts, std::size_t k,
                                              std::size_t jobs) {
    auto dom = image_domain(dv, k);
    std::vector<std::vector<TupleSet>> out(insts.size());
    parallel_for(insts.size(), jobs, [&](std::size_t i) { out[i] = view_images(dv, insts[i], &dom); });
    return out;
}

}  // namespace

void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& body) {
    if (jobs <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < std::min(jobs, n); ++j)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) body(i);
        });
    for (auto& t : pool) t.join();
}

std::vector<Instance> enumerate_instances(std::span<const RelationSymbol> rels, std::size_t k, std::size_t m,
                                          std::span<const ExistentialRule> rules) {
    auto dom = oracle_domain(k);
    std::vector<std::vector<std::vector<Tuple>>> choices;
    for (const auto& r : rels) choices.push_back(subsets(all_tuples(r.arity, dom), m));
    std::vector<Instance> out;
    std::vector<std::size_t> idx(rels.size(), 0);
    while (true) {
        Instance inst;
        for (std::size_t r = 0; r < rels.size(); ++r)
            for (const auto& t : choices[r][idx[r]]) inst.add(rels[r].name, t);
        if (rules.empty() || satisfies(inst, rules)) out.push_back(std::move(inst));
        std::size_t r = rels.size();
        while (r > 0 && idx[r - 1] + 1 == choices[r - 1].size()) idx[--r] = 0;
        if (r == 0) break;
        ++idx[r - 1];
    }
    return out;
}

bool views_agree(const DView& dv, const Instance& d1, const Instance& d2) {
    auto dom = active_domain(d1);
    auto d2dom = active_domain(d2);
    dom.insert(d2dom.begin(), d2dom.end());
    dom = padded_domain(dom, max_arity(dv));
    return view_images(dv, d1, &dom) == view_images(dv, d2, &dom);
}

SqEquivalence sq_equivalence_exact(const Instance& i1, const Instance& i2, const ConjunctiveQuery& q,
                                   const std::string& s, const DSchema& schema) {
    SqEquivalence out;
    auto atoms = source_atoms(q, s, schema);
    if (atoms.empty()) return out;
    ConjunctiveQuery canon = canonical_view(q, s, schema).cq();
    auto ctx = canonical_context(q, s, schema);
    auto side = [&](const Instance& a, const Instance& b, bool left) {
        for (const auto& t : enumerate_matches(canon, a)) {
            std::map<Term, Term> bind;
            for (std::size_t k = 0; k < canon.free_vars.size(); ++k) bind[canon.free_vars[k]] = t[k];
            for (const auto& v : ctx.query.variables())
                if (!bind.count(v)) bind[v] = Term::constant("#ctx_" + v.name());
            Instance c(substitute(ctx.query.atoms, bind));
            Instance combined = b;
            combined.add_all(c);
            if (holds(q, combined)) continue;
            out.equivalent = false;
            out.left_side = left;
            out.match = t;
            out.context = std::move(c);
            return false;
        }
        return true;
    };
    if (side(i1, i2, true)) side(i2, i1, false);
    return out;
}

DeterminacyRefutation refute_determinacy(const ConjunctiveQuery& q, const DView& dv, const DSchema& schema,
                                         const OracleBounds& bounds, std::span<const ExistentialRule> rules) {
    DeterminacyRefutation out;
    auto rels = oracle_relations(schema);
    auto insts = enumerate_instances(rels, bounds.domain_size, bounds.max_facts, rules);
    out.examined = insts.size();
    auto images = all_images(dv, insts, bounds.domain_size, bounds.jobs);
    std::vector<TupleSet> answers(insts.size());
    parallel_for(insts.size(), bounds.jobs, [&](std::size_t i) { answers[i] = enumerate_matches(q, insts[i]); });
    std::map<std::vector<TupleSet>, std::size_t> first;
    std::optional<std::pair<std::size_t, std::size_t>> best;
    for (std::size_t i = 0; i < insts.size(); ++i) {
        auto [it, fresh] = first.emplace(images[i], i);
        if (fresh) continue;
        if (answers[it->second] != answers[i]) {
            best = std::make_pair(it->second, i);
            break;
        }
    }
    if (best) {
        out.found = true;
        out.left = insts[best->first];
        out.right = insts[best->second];
    }
    return out;
}

OracleDisclosure check_un_disclosure_oracle(const DView& dv, const ConjunctiveQuery& p, const DSchema& schema,
                                            const OracleBounds& bounds, std::span<const ExistentialRule> rules) {
    OracleDisclosure out;
    auto rels = oracle_relations(schema);
    auto insts = enumerate_instances(rels, bounds.domain_size, bounds.max_facts, rules);
    out.examined = insts.size();
    auto images = all_images(dv, insts, bounds.domain_size, bounds.jobs);
    std::vector<TupleSet> answers(insts.size());
    parallel_for(insts.size(), bounds.jobs, [&](std::size_t i) { answers[i] = enumerate_matches(p, insts[i]); });
    struct Group {
        std::size_t first = 0;
        TupleSet certain;
    };
    std::map<std::vector<TupleSet>, Group> groups;
    for (std::size_t i = 0; i < insts.size(); ++i) {
        auto it = groups.find(images[i]);
        if (it == groups.end()) {
            groups.emplace(images[i], Group{i, answers[i]});
            continue;
        }
        TupleSet keep;
        std::set_intersection(it->second.certain.begin(), it->second.certain.end(), answers[i].begin(),
                              answers[i].end(), std::inserter(keep, keep.end()));
        it->second.certain = std::move(keep);
    }
    std::optional<std::size_t> best;
    for (const auto& [key, g] : groups)
        if (!g.certain.empty() && (!best || g.first < *best)) best = g.first;
    if (best) {
        out.disclosing = true;
        out.witness = insts[*best];
        out.answer = *groups.at(images[*best]).certain.begin();
    }
    return out;
}

}  // namespace viewforge
