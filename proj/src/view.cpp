#include "viewforge/view.hpp"

#include <algorithm>

#include "viewforge/homomorphism.hpp"
#include "viewforge/ra.hpp"

namespace viewforge {

namespace {

std::string join_atoms(const std::vector<Atom>& atoms) {
    std::string out;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (i) out += ", ";
        out += atoms[i].to_string(true);
    }
    return out;
}

void collect_relations(const RaExpr& e, std::set<std::string>& out) {
    if (e.op == RaOp::Base) out.insert(e.relation);
    if (e.left) collect_relations(*e.left, out);
    if (e.right) collect_relations(*e.right, out);
}

void check_ra_bases(const RaExpr& e, const DSchema& schema, const std::string& view) {
    if (e.op == RaOp::Base) {
        const auto* rel = schema.find(e.relation);
        if (rel && rel->arity != e.attributes.size())
            throw InputError("view '" + view + "': base " + e.relation + " lists " + std::to_string(e.attributes.size()) +
                             " attributes, relation has arity " + std::to_string(rel->arity));
    }
    if (e.left) check_ra_bases(*e.left, schema, view);
    if (e.right) check_ra_bases(*e.right, schema, view);
}

}  // namespace

std::string GuardLiteral::to_string() const {
    return format_term(lhs, true) + (equal ? "=" : "!=") + format_term(rhs, true);
}

std::vector<Term> View::head() const {
    if (is_cq()) return cq().free_vars;
    if (is_dcq()) return dcq().head;
    std::vector<Term> out;
    for (const auto& a : ra_attributes(*ra().expr)) out.push_back(Term::variable(a));
    return out;
}

std::set<std::string> View::relations() const {
    std::set<std::string> out;
    if (is_cq()) {
        for (const auto& a : cq().atoms) out.insert(a.relation);
    } else if (is_dcq()) {
        for (const auto& d : dcq().disjuncts)
            for (const auto& a : d) out.insert(a.relation);
    } else {
        collect_relations(*ra().expr, out);
    }
    return out;
}

std::string View::to_string() const {
    std::string out = "view " + name;
    auto h = head();
    if (!h.empty()) {
        out += "(";
        for (std::size_t i = 0; i < h.size(); ++i) out += (i ? "," : "") + h[i].name();
        out += ")";
    }
    out += " @ " + source + " := ";
    if (is_cq()) return out + join_atoms(cq().atoms);
    if (is_ra()) return out + ra_to_string(*ra().expr);
    const auto& q = dcq();
    for (std::size_t i = 0; i < q.disjuncts.size(); ++i) out += (i ? " | " : "") + join_atoms(q.disjuncts[i]);
    if (!q.guard.empty()) {
        out += " where ";
        for (std::size_t i = 0; i < q.guard.size(); ++i) out += (i ? ", " : "") + q.guard[i].to_string();
    }
    return out;
}

std::vector<const View*> DView::of_source(const std::string& source) const {
    std::vector<const View*> out;
    for (const auto& v : views)
        if (v.source == source) out.push_back(&v);
    return out;
}

bool DView::all_cq() const {
    return std::all_of(views.begin(), views.end(), [](const View& v) { return v.is_cq(); });
}

void check_view(const View& v, const DSchema& schema) {
    if (!schema.has_source(v.source)) throw InputError("view '" + v.name + "' names unknown source '" + v.source + "'");
    for (const auto& rel : v.relations()) {
        const auto* sym = schema.find(rel);
        if (!sym) throw InputError("view '" + v.name + "' reads unknown relation '" + rel + "'");
        if (!sym->in_source(v.source))
            throw InputError("view '" + v.name + "' on source '" + v.source + "' reads '" + rel + "' of another source");
    }
    auto check_atoms = [&](const std::vector<Atom>& atoms) {
        for (const auto& a : atoms) {
            const auto& sym = schema.at(a.relation);
            if (a.args.size() != sym.arity)
                throw InputError("view '" + v.name + "': " + a.to_string() + " has wrong arity, expected " +
                                 std::to_string(sym.arity));
        }
    };
    if (v.is_cq()) {
        v.cq().check();
        check_atoms(v.cq().atoms);
        return;
    }
    if (v.is_ra()) {
        if (!v.ra().expr) throw InputError("view '" + v.name + "' has no expression");
        ra_attributes(*v.ra().expr);
        check_ra_bases(*v.ra().expr, schema, v.name);
        return;
    }
    const auto& q = v.dcq();
    std::set<Term> seen;
    for (const auto& h : q.head) {
        if (!h.is_variable()) throw InputError("view '" + v.name + "': head entries must be variables");
        if (!seen.insert(h).second) throw InputError("view '" + v.name + "' repeats head variable " + h.name());
    }
    if (q.disjuncts.empty()) throw InputError("view '" + v.name + "' has no disjunct");
    for (const auto& d : q.disjuncts) {
        if (d.empty()) throw InputError("view '" + v.name + "' has an empty disjunct");
        check_atoms(d);
        for (const auto& a : d)
            for (const auto& t : a.args)
                if (t.is_null() || t.is_pair()) throw InputError("view '" + v.name + "' has a null or pair argument");
    }
    for (const auto& g : q.guard)
        for (const auto* t : {&g.lhs, &g.rhs})
            if (t->is_variable() && !seen.count(*t))
                throw InputError("view '" + v.name + "': guard variable " + t->name() + " is not in the head");
}

std::set<Term> padded_domain(const std::set<Term>& base, std::size_t fresh) {
    std::set<Term> out = base;
    std::size_t k = 1;
    for (std::size_t added = 0; added < fresh; ++k) {
        Term t = Term::constant("#pad" + std::to_string(k));
        if (out.insert(t).second) ++added;
    }
    return out;
}

TupleSet eval_view(const View& v, const Instance& i, const std::set<Term>* domain) {
    if (v.is_cq()) return enumerate_matches(v.cq(), i);
    if (v.is_ra()) return eval_ra(*v.ra().expr, i).rows;
    if (domain) return eval_dcq(v.dcq(), i, *domain);
    auto dom = padded_domain(active_domain(i), v.dcq().head.size());
    return eval_dcq(v.dcq(), i, dom);
}

std::vector<TupleSet> view_images(const DView& dv, const Instance& i, const std::set<Term>* domain) {
    std::vector<TupleSet> out;
    out.reserve(dv.views.size());
    for (const auto& v : dv.views) out.push_back(eval_view(v, i, domain));
    return out;
}

std::size_t max_arity(const DView& dv) {
    std::size_t out = 0;
    for (const auto& v : dv.views) out = std::max(out, v.arity());
    return out;
}

}  // namespace viewforge
