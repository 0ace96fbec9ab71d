#include "viewforge/shuffle_views.hpp"

#include <algorithm>
#include <functional>

#include "viewforge/canonical_views.hpp"
#include "viewforge/homomorphism.hpp"

namespace viewforge {

std::size_t EqualityType::block_count() const {
    return block_of.empty() ? 0 : *std::max_element(block_of.begin(), block_of.end()) + 1;
}

std::size_t EqualityType::rep(std::size_t var_index) const {
    for (std::size_t k = 0; k < block_of.size(); ++k)
        if (block_of[k] == block_of[var_index]) return k;
    return var_index;
}

std::vector<GuardLiteral> EqualityType::guard() const {
    std::vector<GuardLiteral> out;
    std::vector<std::size_t> reps;
    for (std::size_t k = 0; k < vars.size(); ++k) {
        std::size_t r = rep(k);
        if (r != k) {
            out.push_back({vars[k], vars[r], true});
        } else {
            reps.push_back(k);
        }
    }
    for (std::size_t a = 0; a < reps.size(); ++a)
        for (std::size_t b = a + 1; b < reps.size(); ++b) out.push_back({vars[reps[a]], vars[reps[b]], false});
    return out;
}

Term EqualityType::block_constant(std::size_t var_index) const {
    return Term::constant("#tau_" + vars[rep(var_index)].name());
}

std::string EqualityType::to_string() const {
    std::string out;
    for (std::size_t b = 0; b < block_count(); ++b) {
        out += "{";
        bool first = true;
        for (std::size_t k = 0; k < vars.size(); ++k) {
            if (block_of[k] != b) continue;
            out += (first ? "" : ",") + vars[k].name();
            first = false;
        }
        out += "}";
    }
    return out.empty() ? "{}" : out;
}

EqualityType EqualityType::of_values(const std::vector<Term>& vars, const std::vector<Term>& values) {
    EqualityType t{vars, {}};
    std::vector<Term> seen;
    for (const auto& v : values) {
        auto it = std::find(seen.begin(), seen.end(), v);
        if (it == seen.end()) {
            t.block_of.push_back(seen.size());
            seen.push_back(v);
        } else {
            t.block_of.push_back(static_cast<std::size_t>(it - seen.begin()));
        }
    }
    return t;
}

bool Shuffle::is_identity() const {
    for (std::size_t k = 0; k < image.size(); ++k)
        if (image[k] != k) return false;
    return true;
}

std::string Shuffle::to_string(const std::vector<Term>& vars) const {
    std::string out = "{";
    for (std::size_t k = 0; k < image.size(); ++k)
        out += (k ? "," : "") + vars[k].name() + "->" + vars[image[k]].name();
    return out + "}";
}

void check_shuffle_query(const ConjunctiveQuery& q, const DSchema& schema) {
    if (!q.is_boolean()) throw InputError("shuffle views are defined for Boolean queries only; '" + q.name + "' has free variables");
    for (const auto& a : q.atoms) {
        const auto* sym = schema.find(a.relation);
        if (!sym) throw InputError("unknown relation '" + a.relation + "'");
        if (sym->replicated())
            throw InputError("shuffle views do not support the replicated relation '" + a.relation + "'");
        for (const auto& t : a.args)
            if (!t.is_variable()) throw InputError("shuffle views do not support constants in " + a.to_string());
    }
}

namespace {

std::vector<EqualityType> all_types(const std::vector<Term>& vars) {
    std::vector<EqualityType> out;
    std::vector<std::size_t> rgs(vars.size(), 0);
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t k, std::size_t used) {
        if (k == vars.size()) {
            out.push_back({vars, rgs});
            return;
        }
        for (std::size_t b = 0; b <= used && b <= k; ++b) {
            rgs[k] = b;
            rec(k + 1, std::max(used, b + 1));
        }
    };
    rec(0, 0);
    return out;
}

std::vector<Shuffle> all_shuffles(std::size_t n) {
    std::vector<Shuffle> out;
    std::vector<std::size_t> img(n, 0);
    while (true) {
        out.push_back({img});
        std::size_t k = n;
        while (k > 0 && img[k - 1] == n - 1) img[--k] = 0;
        if (k == 0) break;
        ++img[k - 1];
    }
    return out;
}

// σ_τ∘μ: the block reached from each frontier variable.
std::vector<std::size_t> composite_key(const EqualityType& tau, const Shuffle& mu) {
    std::vector<std::size_t> key;
    for (auto i : mu.image) key.push_back(tau.block_of[i]);
    return key;
}

class InvarianceChecker {
  public:
    InvarianceChecker(const ConjunctiveQuery& q, const std::string& s, const DSchema& schema,
                      std::span<const ExistentialRule> rules, const ShuffleConfig& cfg)
        : ctx_(canonical_context(q, s, schema)),
          sjvars_(source_vars(q, schema).of(s).sjvars),
          rules_(rules),
          cfg_(cfg) {}

    Tri check(const EqualityType& tau, const Shuffle& mu) {
        if (ctx_.degenerate) return Tri::Yes;
        auto key = std::make_pair(tau.block_of, composite_key(tau, mu));
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        const auto& tgt = target(tau);
        std::map<Term, Term> shuffled;
        for (std::size_t k = 0; k < sjvars_.size(); ++k) shuffled[sjvars_[k]] = tau.block_constant(mu.image[k]);
        auto src = substitute(ctx_.query.atoms, shuffled);
        Tri r;
        if (find_homomorphism(src, tgt.instance)) {
            r = Tri::Yes;
        } else {
            r = tgt.complete ? Tri::No : Tri::Unknown;
        }
        cache_.emplace(std::move(key), r);
        return r;
    }

    const std::vector<Term>& sjvars() const { return sjvars_; }

  private:
    struct Target {
        Instance instance;
        bool complete = true;
    };

    const Target& target(const EqualityType& tau) {
        auto it = targets_.find(tau.block_of);
        if (it != targets_.end()) return it->second;
        std::map<Term, Term> bind;
        for (std::size_t k = 0; k < sjvars_.size(); ++k) bind[sjvars_[k]] = tau.block_constant(k);
        for (const auto& v : ctx_.query.variables())
            if (!bind.count(v)) bind[v] = frozen(v);
        Target t;
        t.instance = Instance(substitute(ctx_.query.atoms, bind));
        if (!rules_.empty()) {
            auto res = run_chase(t.instance, rules_, cfg_.chase);
            t.instance = std::move(res.instance);
            t.complete = res.completed;
        }
        return targets_.emplace(tau.block_of, std::move(t)).first->second;
    }

    CanonicalContext ctx_;
    std::vector<Term> sjvars_;
    std::span<const ExistentialRule> rules_;
    ShuffleConfig cfg_;
    std::map<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>, Tri> cache_;
    std::map<std::vector<std::size_t>, Target> targets_;
};

std::vector<Atom> shuffled_body(const std::vector<Atom>& body, const std::vector<Term>& sjvars, const EqualityType& tau,
                                const Shuffle& mu) {
    std::map<Term, Term> m;
    for (std::size_t k = 0; k < sjvars.size(); ++k) m[sjvars[k]] = sjvars[tau.rep(mu.image[k])];
    return substitute(body, m);
}

Shuffle identity(std::size_t n) {
    Shuffle id;
    for (std::size_t k = 0; k < n; ++k) id.image.push_back(k);
    return id;
}

}  // namespace

TypesAndShuffles enumerate_types_and_shuffles(const ConjunctiveQuery& q, const std::string& s, const DSchema& schema,
                                              std::size_t cap) {
    check_shuffle_query(q, schema);
    TypesAndShuffles out;
    out.source = s;
    out.sjvars = source_vars(q, schema).of(s).sjvars;
    if (out.sjvars.size() > cap) throw TooManyFrontierVars(out.sjvars.size(), cap);
    out.types = all_types(out.sjvars);
    out.shuffles = all_shuffles(out.sjvars.size());
    return out;
}

Tri is_invariant_shuffle(const Shuffle& mu, const EqualityType& tau, const ConjunctiveQuery& q, const std::string& s,
                         const DSchema& schema, std::span<const ExistentialRule> rules, const ShuffleConfig& cfg) {
    check_shuffle_query(q, schema);
    InvarianceChecker checker(q, s, schema, rules, cfg);
    if (mu.image.size() != checker.sjvars().size() || tau.block_of.size() != checker.sjvars().size())
        throw InputError("shuffle or type does not match the source-join variables");
    return checker.check(tau, mu);
}

DView ShuffleDesign::dview(const std::string& name) const {
    DView out;
    out.name = name;
    for (const auto& v : views) out.views.push_back(v.view);
    return out;
}

ShuffleDesign build_shuffle_views(const ConjunctiveQuery& q, const DSchema& schema,
                                  std::span<const ExistentialRule> rules, const ShuffleConfig& cfg) {
    check_shuffle_query(q, schema);
    ShuffleDesign out;
    for (const auto& s : sources_of(q, schema)) {
        auto ts = enumerate_types_and_shuffles(q, s, schema, cfg.cap);
        InvarianceChecker checker(q, s, schema, rules, cfg);
        auto body = canonical_view(q, s, schema).cq().atoms;
        Shuffle id = identity(ts.sjvars.size());
        for (std::size_t t = 0; t < ts.types.size(); ++t) {
            const auto& tau = ts.types[t];
            ShuffleView sv;
            sv.source = s;
            sv.type = tau;
            std::set<std::vector<std::size_t>> seen;
            DisjunctiveQuery dq;
            dq.head = ts.sjvars;
            dq.guard = tau.guard();
            auto consider = [&](const Shuffle& mu) {
                auto key = composite_key(tau, mu);
                if (seen.count(key)) return;
                Tri r = checker.check(tau, mu);
                if (r == Tri::Unknown) sv.incomplete = true;
                if (r != Tri::Yes) return;
                seen.insert(key);
                sv.shuffles.push_back(mu);
                dq.disjuncts.push_back(shuffled_body(body, ts.sjvars, tau, mu));
            };
            consider(id);
            for (const auto& mu : ts.shuffles) consider(mu);
            std::string name = "SV_" + s + "_" + std::to_string(t + 1);
            sv.view = View{name, s, std::move(dq)};
            out.incomplete = out.incomplete || sv.incomplete;
            out.views.push_back(std::move(sv));
        }
    }
    return out;
}

ShuffleEquivalence shuffle_equivalent(const Instance& i1, const Instance& i2, const ConjunctiveQuery& q,
                                      const std::string& s, const DSchema& schema,
                                      std::span<const ExistentialRule> rules, const ShuffleConfig& cfg) {
    check_shuffle_query(q, schema);
    ShuffleEquivalence out;
    auto atoms = source_atoms(q, s, schema);
    if (atoms.empty()) return out;
    auto ts = enumerate_types_and_shuffles(q, s, schema, cfg.cap);
    InvarianceChecker checker(q, s, schema, rules, cfg);
    ConjunctiveQuery canon = canonical_view(q, s, schema).cq();
    const auto& vars = ts.sjvars;
    bool unknown = false;

    auto one_side = [&](const Instance& a, const Instance& b, bool left) {
        for (const auto& t : enumerate_matches(canon, a)) {
            auto tau = EqualityType::of_values(vars, t);
            bool found = false;
            bool maybe = false;
            for (const auto& mu : ts.shuffles) {
                Tri r = checker.check(tau, mu);
                if (r == Tri::No) continue;
                Assignment pinned;
                for (std::size_t k = 0; k < vars.size(); ++k) pinned[vars[k]] = t[mu.image[k]];
                if (!find_homomorphism(canon.atoms, b, pinned)) continue;
                if (r == Tri::Yes) {
                    found = true;
                    break;
                }
                maybe = true;
            }
            if (found) continue;
            if (maybe) {
                unknown = true;
                continue;
            }
            out.verdict = Tri::No;
            out.left_side = left;
            out.unmatched = t;
            return false;
        }
        return true;
    };
    if (!one_side(i1, i2, true) || !one_side(i2, i1, false)) return out;
    out.verdict = unknown ? Tri::Unknown : Tri::Yes;
    return out;
}

Tri has_only_trivial_shuffles(const ConjunctiveQuery& q, const DSchema& schema, std::span<const ExistentialRule> rules,
                              const ShuffleConfig& cfg) {
    check_shuffle_query(q, schema);
    bool unknown = false;
    for (const auto& s : sources_of(q, schema)) {
        auto ts = enumerate_types_and_shuffles(q, s, schema, cfg.cap);
        InvarianceChecker checker(q, s, schema, rules, cfg);
        for (const auto& tau : ts.types) {
            auto id_key = composite_key(tau, identity(ts.sjvars.size()));
            for (const auto& mu : ts.shuffles) {
                if (composite_key(tau, mu) == id_key) continue;
                Tri r = checker.check(tau, mu);
                if (r == Tri::Yes) return Tri::No;
                if (r == Tri::Unknown) unknown = true;
            }
        }
    }
    return unknown ? Tri::Unknown : Tri::Yes;
}

}  // namespace viewforge
