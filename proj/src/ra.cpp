#include "viewforge/ra.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <unordered_map>

#include "viewforge/homomorphism.hpp"

namespace viewforge {

namespace {

RaPtr make(RaExpr e) { return std::make_shared<const RaExpr>(std::move(e)); }

std::size_t index_of(const std::vector<std::string>& attrs, const std::string& a) {
    auto it = std::find(attrs.begin(), attrs.end(), a);
    if (it == attrs.end()) throw InputError("unknown attribute '" + a + "'");
    return static_cast<std::size_t>(it - attrs.begin());
}

bool same_set(std::vector<std::string> a, std::vector<std::string> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
}

const char* op_name(RaOp op) {
    switch (op) {
    case RaOp::Base: return "base";
    case RaOp::Join: return "join";
    case RaOp::Project: return "project";
    case RaOp::Select: return "select";
    case RaOp::Union: return "union";
    case RaOp::Difference: return "diff";
    case RaOp::Rename: return "rename";
    }
    return "?";
}

}  // namespace

RaPtr ra_base(std::string relation, std::vector<std::string> attributes) {
    RaExpr e;
    e.op = RaOp::Base;
    e.relation = std::move(relation);
    e.attributes = std::move(attributes);
    return make(std::move(e));
}

RaPtr ra_join(RaPtr l, RaPtr r) {
    RaExpr e;
    e.op = RaOp::Join;
    e.left = std::move(l);
    e.right = std::move(r);
    return make(std::move(e));
}

RaPtr ra_project(RaPtr x, std::vector<std::string> attributes) {
    RaExpr e;
    e.op = RaOp::Project;
    e.left = std::move(x);
    e.attributes = std::move(attributes);
    return make(std::move(e));
}

RaPtr ra_select(RaPtr x, std::vector<SelectCondition> conditions) {
    RaExpr e;
    e.op = RaOp::Select;
    e.left = std::move(x);
    e.conditions = std::move(conditions);
    return make(std::move(e));
}

RaPtr ra_union(RaPtr l, RaPtr r) {
    RaExpr e;
    e.op = RaOp::Union;
    e.left = std::move(l);
    e.right = std::move(r);
    return make(std::move(e));
}

RaPtr ra_difference(RaPtr l, RaPtr r) {
    RaExpr e;
    e.op = RaOp::Difference;
    e.left = std::move(l);
    e.right = std::move(r);
    return make(std::move(e));
}

RaPtr ra_rename(RaPtr x, std::map<std::string, std::string> renames) {
    RaExpr e;
    e.op = RaOp::Rename;
    e.left = std::move(x);
    e.renames = std::move(renames);
    return make(std::move(e));
}

std::vector<std::string> ra_attributes(const RaExpr& e) {
    switch (e.op) {
    case RaOp::Base: {
        auto sorted = e.attributes;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw InputError("base " + e.relation + " repeats an attribute");
        return e.attributes;
    }
    case RaOp::Join: {
        auto out = ra_attributes(*e.left);
        for (const auto& a : ra_attributes(*e.right))
            if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
        return out;
    }
    case RaOp::Project: {
        auto in = ra_attributes(*e.left);
        for (const auto& a : e.attributes) index_of(in, a);
        return e.attributes;
    }
    case RaOp::Select: {
        auto in = ra_attributes(*e.left);
        for (const auto& c : e.conditions) {
            index_of(in, c.lhs);
            if (c.rhs_attribute) index_of(in, *c.rhs_attribute);
        }
        return in;
    }
    case RaOp::Union:
    case RaOp::Difference: {
        auto l = ra_attributes(*e.left);
        if (!same_set(l, ra_attributes(*e.right)))
            throw InputError(std::string(op_name(e.op)) + " operands have different attributes");
        return l;
    }
    case RaOp::Rename: {
        auto out = ra_attributes(*e.left);
        for (auto& a : out) {
            auto it = e.renames.find(a);
            if (it != e.renames.end()) a = it->second;
        }
        return out;
    }
    }
    return {};
}

std::string ra_to_string(const RaExpr& e) {
    std::string out = "(" + std::string(op_name(e.op));
    switch (e.op) {
    case RaOp::Base:
        out += " " + e.relation;
        for (const auto& a : e.attributes) out += " " + a;
        break;
    case RaOp::Project:
        out += " " + ra_to_string(*e.left);
        for (const auto& a : e.attributes) out += " " + a;
        break;
    case RaOp::Select:
        out += " " + ra_to_string(*e.left);
        for (const auto& c : e.conditions) {
            out += std::string(" (") + (c.equal ? "=" : "!=") + " " + c.lhs + " ";
            out += c.rhs_attribute ? *c.rhs_attribute : format_term(*c.rhs_constant, true);
            out += ")";
        }
        break;
    case RaOp::Rename:
        out += " " + ra_to_string(*e.left);
        for (const auto& [from, to] : e.renames) out += " (" + from + " " + to + ")";
        break;
    default: out += " " + ra_to_string(*e.left) + " " + ra_to_string(*e.right);
    }
    return out + ")";
}

bool ra_equal(const RaExpr& a, const RaExpr& b) { return ra_to_string(a) == ra_to_string(b); }

bool operator==(const RaQuery& a, const RaQuery& b) {
    if (!a.expr || !b.expr) return a.expr == b.expr;
    return ra_equal(*a.expr, *b.expr);
}

namespace {

Relation reorder(const Relation& r, const std::vector<std::string>& attrs) {
    std::vector<std::size_t> idx;
    for (const auto& a : attrs) idx.push_back(index_of(r.attributes, a));
    Relation out{attrs, {}};
    for (const auto& row : r.rows) {
        Tuple t;
        t.reserve(idx.size());
        for (auto k : idx) t.push_back(row[k]);
        out.rows.insert(std::move(t));
    }
    return out;
}

}  // namespace

Relation eval_ra(const RaExpr& e, const Instance& inst) {
    switch (e.op) {
    case RaOp::Base: {
        Relation out{ra_attributes(e), {}};
        for (const auto& t : inst.tuples(e.relation)) {
            if (t.size() != out.attributes.size())
                throw InputError("base " + e.relation + " has " + std::to_string(out.attributes.size()) +
                                 " attributes but facts of arity " + std::to_string(t.size()));
            out.rows.insert(t);
        }
        return out;
    }
    case RaOp::Join: {
        Relation l = eval_ra(*e.left, inst);
        Relation r = eval_ra(*e.right, inst);
        std::vector<std::size_t> lkey, rkey, rrest;
        for (std::size_t j = 0; j < r.attributes.size(); ++j) {
            auto it = std::find(l.attributes.begin(), l.attributes.end(), r.attributes[j]);
            if (it != l.attributes.end()) {
                lkey.push_back(static_cast<std::size_t>(it - l.attributes.begin()));
                rkey.push_back(j);
            } else {
                rrest.push_back(j);
            }
        }
        Relation out{l.attributes, {}};
        for (auto j : rrest) out.attributes.push_back(r.attributes[j]);
        std::map<Tuple, std::vector<const Tuple*>> index;
        for (const auto& row : r.rows) {
            Tuple key;
            for (auto j : rkey) key.push_back(row[j]);
            index[key].push_back(&row);
        }
        for (const auto& row : l.rows) {
            Tuple key;
            for (auto k : lkey) key.push_back(row[k]);
            auto it = index.find(key);
            if (it == index.end()) continue;
            for (const auto* match : it->second) {
                Tuple t = row;
                for (auto j : rrest) t.push_back((*match)[j]);
                out.rows.insert(std::move(t));
            }
        }
        return out;
    }
    case RaOp::Project: return reorder(eval_ra(*e.left, inst), e.attributes);
    case RaOp::Select: {
        Relation in = eval_ra(*e.left, inst);
        struct Compiled {
            std::size_t lhs;
            std::optional<std::size_t> rhs;
            std::optional<Term> constant;
            bool equal;
        };
        std::vector<Compiled> conds;
        for (const auto& c : e.conditions)
            conds.push_back({index_of(in.attributes, c.lhs),
                             c.rhs_attribute ? std::optional(index_of(in.attributes, *c.rhs_attribute)) : std::nullopt,
                             c.rhs_constant, c.equal});
        Relation out{in.attributes, {}};
        for (const auto& row : in.rows) {
            bool keep = true;
            for (const auto& c : conds) {
                const Term& rhs = c.rhs ? row[*c.rhs] : *c.constant;
                if ((row[c.lhs] == rhs) != c.equal) {
                    keep = false;
                    break;
                }
            }
            if (keep) out.rows.insert(row);
        }
        return out;
    }
    case RaOp::Union:
    case RaOp::Difference: {
        Relation l = eval_ra(*e.left, inst);
        Relation r = eval_ra(*e.right, inst);
        if (!same_set(l.attributes, r.attributes))
            throw InputError(std::string(op_name(e.op)) + " operands have different attributes");
        Relation rr = reorder(r, l.attributes);
        if (e.op == RaOp::Union) {
            l.rows.insert(rr.rows.begin(), rr.rows.end());
        } else {
            for (const auto& row : rr.rows) l.rows.erase(row);
        }
        return l;
    }
    case RaOp::Rename: {
        Relation in = eval_ra(*e.left, inst);
        in.attributes = ra_attributes(e);
        return in;
    }
    }
    return {};
}

TupleSet eval_dcq(const DisjunctiveQuery& q, const Instance& inst, const std::set<Term>& domain) {
    TupleSet out;
    std::vector<Term> dom(domain.begin(), domain.end());
    std::map<Term, std::size_t> col;
    for (std::size_t k = 0; k < q.head.size(); ++k) col[q.head[k]] = k;

    auto guard_ok = [&](const Tuple& t) {
        for (const auto& g : q.guard) {
            auto value = [&](const Term& x) -> const Term& {
                auto it = col.find(x);
                return it == col.end() ? x : t[it->second];
            };
            if ((value(g.lhs) == value(g.rhs)) != g.equal) return false;
        }
        return true;
    };

    for (const auto& disjunct : q.disjuncts) {
        for_each_homomorphism(disjunct, inst, {}, {.map_nulls = false}, [&](const Assignment& h) {
            Tuple t(q.head.size());
            std::vector<std::size_t> open;
            for (std::size_t k = 0; k < q.head.size(); ++k) {
                auto it = h.find(q.head[k]);
                if (it != h.end()) {
                    t[k] = it->second;
                } else {
                    open.push_back(k);
                }
            }
            std::function<void(std::size_t)> expand = [&](std::size_t n) {
                if (n == open.size()) {
                    if (guard_ok(t)) out.insert(t);
                    return;
                }
                for (const auto& d : dom) {
                    t[open[n]] = d;
                    expand(n + 1);
                }
            };
            expand(0);
            return true;
        });
    }
    return out;
}

namespace {

// Join of the disjunct's atoms with named attributes; repeated variables and
// constants inside one atom become fresh attributes plus a selection.
RaPtr conjunction_to_ra(const std::vector<Atom>& atoms, std::size_t disjunct) {
    RaPtr acc;
    for (std::size_t a = 0; a < atoms.size(); ++a) {
        const auto& atom = atoms[a];
        std::vector<std::string> attrs;
        std::vector<SelectCondition> conds;
        for (std::size_t k = 0; k < atom.args.size(); ++k) {
            const auto& t = atom.args[k];
            std::string fresh = "@" + std::to_string(disjunct) + "_" + std::to_string(a) + "_" + std::to_string(k);
            if (t.is_variable() && std::find(attrs.begin(), attrs.end(), t.name()) == attrs.end()) {
                attrs.push_back(t.name());
            } else if (t.is_variable()) {
                attrs.push_back(fresh);
                conds.push_back({t.name(), fresh, std::nullopt, true});
            } else {
                attrs.push_back(fresh);
                conds.push_back({fresh, std::nullopt, t, true});
            }
        }
        RaPtr base = ra_base(atom.relation, attrs);
        if (!conds.empty()) {
            // Drop helper columns right away.
            std::vector<std::string> keep;
            for (const auto& x : attrs)
                if (x[0] != '@') keep.push_back(x);
            base = ra_project(ra_select(base, conds), keep);
        }
        acc = acc ? ra_join(acc, base) : base;
    }
    return acc;
}

}  // namespace

std::vector<View> compile_dcq_to_ra(const View& v) {
    if (!v.is_dcq()) throw InputError("view '" + v.name + "' is not a disjunctive query");
    const auto& q = v.dcq();
    const auto& head = q.head;
    auto head_index = [&](const Term& t) -> std::optional<std::size_t> {
        auto it = std::find(head.begin(), head.end(), t);
        if (it == head.end()) return std::nullopt;
        return static_cast<std::size_t>(it - head.begin());
    };

    // Union-find over head positions from the equality literals.
    std::vector<std::size_t> parent(head.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        return parent[x] == x ? x : parent[x] = find(parent[x]);
    };
    std::vector<std::pair<std::size_t, std::size_t>> diseq;
    for (const auto& g : q.guard) {
        auto l = head_index(g.lhs);
        auto r = head_index(g.rhs);
        if (!l || !r) throw InputError("view '" + v.name + "': only guards between head variables can be compiled");
        if (g.equal) {
            auto a = find(*l), b = find(*r);
            parent[std::max(a, b)] = std::min(a, b);
        } else {
            diseq.emplace_back(*l, *r);
        }
    }
    std::map<Term, Term> to_rep;
    for (std::size_t k = 0; k < head.size(); ++k) to_rep[head[k]] = head[find(k)];
    std::vector<std::pair<std::size_t, std::size_t>> rep_diseq;
    for (auto [l, r] : diseq) {
        auto a = find(l), b = find(r);
        if (a == b) return {};  // guard is unsatisfiable: the view is always empty
        rep_diseq.emplace_back(std::min(a, b), std::max(a, b));
    }

    struct Part {
        std::vector<std::size_t> vars;  // rep head positions, ascending
        RaPtr expr;
    };
    std::vector<Part> parts;
    for (std::size_t d = 0; d < q.disjuncts.size(); ++d) {
        if (q.disjuncts[d].empty()) throw InputError("view '" + v.name + "' has an empty disjunct");
        auto atoms = substitute(q.disjuncts[d], to_rep);
        std::set<std::size_t> used;
        for (const auto& a : atoms)
            for (const auto& t : a.args)
                if (auto k = head_index(t)) used.insert(*k);
        Part p;
        p.vars.assign(used.begin(), used.end());
        std::vector<std::string> names;
        for (auto k : p.vars) names.push_back(head[k].name());
        std::vector<SelectCondition> conds;
        for (auto [a, b] : rep_diseq)
            if (used.count(a) && used.count(b)) conds.push_back({head[a].name(), head[b].name(), std::nullopt, false});
        RaPtr e = conjunction_to_ra(atoms, d);
        if (!conds.empty()) e = ra_select(e, conds);
        if (ra_attributes(*e) != names) e = ra_project(e, names);
        p.expr = e;
        parts.push_back(std::move(p));
    }

    // Group disjuncts by variable set, in order of first appearance.
    std::vector<std::vector<std::size_t>> groups;
    std::vector<RaPtr> group_expr;
    for (const auto& p : parts) {
        auto it = std::find(groups.begin(), groups.end(), p.vars);
        if (it == groups.end()) {
            groups.push_back(p.vars);
            group_expr.push_back(p.expr);
        } else {
            auto g = static_cast<std::size_t>(it - groups.begin());
            group_expr[g] = ra_union(group_expr[g], p.expr);
        }
    }

    std::vector<View> out;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const auto& vars = groups[g];
        std::vector<std::string> names;
        for (auto k : vars) names.push_back(head[k].name());
        RaPtr positive = group_expr[g];
        RaPtr negative;
        for (std::size_t h = 0; h < groups.size(); ++h) {
            const auto& sub = groups[h];
            bool strict_subset = sub.size() < vars.size() && std::includes(vars.begin(), vars.end(), sub.begin(), sub.end());
            if (!strict_subset) continue;
            RaPtr blocked = ra_project(ra_join(positive, group_expr[h]), names);
            negative = negative ? ra_union(negative, blocked) : blocked;
        }
        RaPtr expr = negative ? ra_difference(positive, negative) : positive;
        out.push_back(View{v.name + "_S" + std::to_string(g + 1), v.source, RaQuery{expr}});
    }
    return out;
}

}  // namespace viewforge
