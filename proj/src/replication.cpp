#include "viewforge/replication.hpp"

#include <algorithm>

namespace viewforge {

Instance synchronous_product(const Instance& a, const Instance& b) {
    Instance out;
    for (const auto& [rel, left] : a.relations()) {
        const auto& right = b.tuples(rel);
        for (const auto& x : left)
            for (const auto& y : right) {
                if (x.size() != y.size()) continue;
                Tuple t;
                t.reserve(x.size());
                for (std::size_t i = 0; i < x.size(); ++i) t.push_back(Term::pair(x[i], y[i]));
                out.add(rel, std::move(t));
            }
    }
    return out;
}

Assignment projection(const Instance& product, bool first) {
    Assignment h;
    for (const auto& e : active_domain(product))
        if (e.is_pair()) h[e] = first ? e.left() : e.right();
    return h;
}

bool projections_are_homomorphisms(const Instance& product, const Instance& a, const Instance& b) {
    auto facts = product.facts();
    return is_homomorphism(facts, a, projection(product, true)) && is_homomorphism(facts, b, projection(product, false));
}

std::optional<int> min_pair_height(const Instance& i, const std::set<std::string>& relations) {
    std::optional<int> out;
    for (const auto& rel : relations)
        for (const auto& t : i.tuples(rel))
            for (const auto& x : t) out = out ? std::min(*out, x.pair_height()) : x.pair_height();
    return out;
}

Instance str_local(const Instance& local, const ConjunctiveQuery& q, const std::string& source, const DSchema& schema) {
    Instance canon = build_canondb(q).filter([&](const std::string& rel) {
        const auto* sym = schema.find(rel);
        return sym && sym->in_source(source);
    });
    return synchronous_product(local, canon);
}

DInstance str_transform(const DInstance& d, const ConjunctiveQuery& q, const DSchema& schema) {
    DInstance out;
    for (const auto& s : schema.sources()) {
        out.local_mut(s) = str_local(d.local(s), q, s, schema);
    }
    return out;
}

FullRepReport fullrep_design(const ConjunctiveQuery& q, const ConjunctiveQuery& p, const DSchema& schema) {
    FullRepReport out;
    if (!q.is_boolean() || !p.is_boolean()) throw InputError("utility query and secret must be Boolean");
    for (const auto& a : q.atoms) {
        const auto& sym = schema.at(a.relation);
        if (sym.arity == 0 || sym.sources.size() != schema.sources().size() || sym.sources.size() < 2) continue;
        out.replicated_relation = sym.name;
        break;
    }
    if (out.replicated_relation.empty()) {
        out.reason = "the query uses no relation of non-zero arity replicated across all sources";
        return out;
    }
    if (find_cq_homomorphism(p, q)) {
        out.reason = "the secret maps homomorphically into the query, so any useful view discloses it";
        return out;
    }
    out.applicable = true;
    out.reason = "views identifying each local instance with its iterated products with canondb(q)";
    out.sample = DInstance::distribute(schema, build_canondb(q));
    out.str1 = str_transform(out.sample, q, schema);
    out.str2 = str_transform(out.str1, q, schema);
    out.projections_ok = true;
    for (const auto& s : schema.sources()) {
        Instance canon = build_canondb(q).filter([&](const std::string& rel) { return schema.at(rel).in_source(s); });
        out.projections_ok = out.projections_ok &&
                             projections_are_homomorphisms(out.str1.local(s), out.sample.local(s), canon) &&
                             projections_are_homomorphisms(out.str2.local(s), out.str1.local(s), canon);
    }
    out.secret_fails = !holds(p, out.str1.global()) && !holds(p, out.str2.global());
    bool before = holds(q, out.sample.global());
    out.query_preserved = holds(q, out.str1.global()) == before && holds(q, out.str2.global()) == before;
    std::set<std::string> rep{out.replicated_relation};
    out.height_before = min_pair_height(out.sample.global(), rep);
    out.height_after = min_pair_height(out.str1.global(), rep);
    return out;
}

namespace {

bool same(const DInstance& a, const DInstance& b, const DSchema& schema) {
    for (const auto& s : schema.sources())
        if (!(a.local(s) == b.local(s))) return false;
    return true;
}

std::optional<std::size_t> iterate_distance(const Instance& a, const Instance& b, const ConjunctiveQuery& q,
                                            const std::string& s, const DSchema& schema, std::size_t max_iter) {
    Instance x = a, y = b;
    for (std::size_t i = 0; i <= max_iter; ++i) {
        if (x == b || y == a) return i;
        if (i == max_iter) break;
        x = str_local(x, q, s, schema);
        y = str_local(y, q, s, schema);
    }
    return std::nullopt;
}

}  // namespace

StrEquivalence str_equivalent(const DInstance& d, const DInstance& d2, const ConjunctiveQuery& q,
                              const DSchema& schema, std::size_t max_iter) {
    StrEquivalence out;
    out.per_source_all = true;
    for (const auto& s : schema.sources()) {
        auto k = iterate_distance(d.local(s), d2.local(s), q, s, schema, max_iter);
        out.per_source[s] = k;
        if (!k) out.per_source_all = false;
    }
    DInstance x = d, y = d2;
    for (std::size_t i = 0; i <= max_iter; ++i) {
        if (same(x, d2, schema) || same(y, d, schema)) {
            out.global = i;
            break;
        }
        if (i == max_iter) break;
        x = str_transform(x, q, schema);
        y = str_transform(y, q, schema);
    }
    if (holds(q, d.global()) && validate_dschema(schema, d).empty() && validate_dschema(schema, d2).empty())
        out.coincidence = out.per_source_all == out.global.has_value();
    return out;
}

}  // namespace viewforge
