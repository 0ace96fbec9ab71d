#include "viewforge/model.hpp"

#include <algorithm>
#include <functional>
#include <mutex>
#include <unordered_map>
#include <sstream>

namespace viewforge {

Term Term::constant(std::string name) {
    if (name.empty()) throw InputError("constant name must be nonempty");
    Term t;
    t.kind_ = TermKind::Constant;
    t.name_ = std::move(name);
    return t;
}

Term Term::variable(std::string name) {
    if (name.empty()) throw InputError("variable name must be nonempty");
    Term t;
    t.kind_ = TermKind::Variable;
    t.name_ = std::move(name);
    return t;
}

Term Term::null(std::int64_t id, std::string label) {
    Term t;
    t.kind_ = TermKind::Null;
    t.id_ = id;
    t.name_ = std::move(label);
    return t;
}

Term Term::pair(Term left, Term right) {
    Term t;
    t.kind_ = TermKind::Pair;
    t.id_ = std::max(left.pair_height(), right.pair_height()) + 1;
    t.pair_ = std::make_shared<const std::pair<Term, Term>>(std::move(left), std::move(right));
    return t;
}

const Term& Term::left() const {
    if (!pair_) throw std::logic_error("left() on a non-pair term");
    return pair_->first;
}

const Term& Term::right() const {
    if (!pair_) throw std::logic_error("right() on a non-pair term");
    return pair_->second;
}

int Term::pair_height() const { return kind_ == TermKind::Pair ? static_cast<int>(id_) : 0; }

std::string Term::to_string() const { return format_term(*this, false); }

bool operator==(const Term& a, const Term& b) {
    if (a.kind_ != b.kind_) return false;
    switch (a.kind_) {
    case TermKind::Constant:
    case TermKind::Variable: return a.name_ == b.name_;
    case TermKind::Null: return a.id_ == b.id_;
    case TermKind::Pair: return a.pair_ == b.pair_ || (a.left() == b.left() && a.right() == b.right());
    }
    return false;
}

std::strong_ordering operator<=>(const Term& a, const Term& b) {
    if (a.kind_ != b.kind_) return a.kind_ <=> b.kind_;
    switch (a.kind_) {
    case TermKind::Constant:
    case TermKind::Variable: return a.name_ <=> b.name_;
    case TermKind::Null: return a.id_ <=> b.id_;
    case TermKind::Pair:
        if (a.pair_ == b.pair_) return std::strong_ordering::equal;
        if (auto c = a.left() <=> b.left(); c != 0) return c;
        return a.right() <=> b.right();
    }
    return std::strong_ordering::equal;
}

std::string format_term(const Term& t, bool quote_constants) {
    switch (t.kind()) {
    case TermKind::Constant: return quote_constants ? "\"" + t.name() + "\"" : t.name();
    case TermKind::Variable: return t.name();
    case TermKind::Null: return t.name().empty() ? "n" + std::to_string(t.null_id()) : t.name();
    case TermKind::Pair:
        return "(" + format_term(t.left(), quote_constants) + "," + format_term(t.right(), quote_constants) + ")";
    }
    return {};
}

bool RelationSymbol::in_source(const std::string& source) const {
    return std::find(sources.begin(), sources.end(), source) != sources.end();
}

void DSchema::add_source(const std::string& source) {
    if (source.empty()) throw InputError("source id must be nonempty");
    if (has_source(source)) throw InputError("duplicate source '" + source + "'");
    sources_.push_back(source);
}

void DSchema::add_relation(RelationSymbol rel) {
    if (rel.name.empty()) throw InputError("relation name must be nonempty");
    if (find(rel.name)) throw InputError("relation '" + rel.name + "' declared twice");
    if (rel.sources.empty()) throw InputError("relation '" + rel.name + "' has no source");
    for (const auto& s : rel.sources)
        if (!has_source(s)) throw InputError("relation '" + rel.name + "' refers to unknown source '" + s + "'");
    std::vector<std::string> uniq = rel.sources;
    std::sort(uniq.begin(), uniq.end());
    if (std::adjacent_find(uniq.begin(), uniq.end()) != uniq.end())
        throw InputError("relation '" + rel.name + "' lists a source twice");
    relations_.push_back(std::move(rel));
}

bool DSchema::has_source(const std::string& source) const {
    return std::find(sources_.begin(), sources_.end(), source) != sources_.end();
}

const RelationSymbol* DSchema::find(const std::string& name) const {
    for (const auto& r : relations_)
        if (r.name == name) return &r;
    return nullptr;
}

const RelationSymbol& DSchema::at(const std::string& name) const {
    if (const auto* r = find(name)) return *r;
    throw InputError("unknown relation '" + name + "'");
}

std::vector<RelationSymbol> DSchema::relations_of(const std::string& source) const {
    std::vector<RelationSymbol> out;
    for (const auto& r : relations_)
        if (r.in_source(source)) out.push_back(r);
    return out;
}

std::vector<RelationSymbol> DSchema::replicated() const {
    std::vector<RelationSymbol> out;
    for (const auto& r : relations_)
        if (r.replicated()) out.push_back(r);
    return out;
}

Atom::Atom(const RelationSymbol& rel, std::vector<Term> arguments) : relation(rel.name), args(std::move(arguments)) {
    if (args.size() != rel.arity)
        throw InputError("atom over '" + rel.name + "' has " + std::to_string(args.size()) + " arguments, expected " +
                         std::to_string(rel.arity));
}

std::string Atom::to_string(bool quote_constants) const {
    std::string out = relation + "(";
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) out += ",";
        out += format_term(args[i], quote_constants);
    }
    return out + ")";
}

Instance::Instance(const std::vector<Atom>& facts) {
    for (const auto& f : facts) add(f);
}

bool Instance::add(const Atom& fact) { return add(fact.relation, fact.args); }

struct Instance::Index {
    std::map<std::string, std::vector<std::unordered_map<Term, Column>>> columns;
    void insert(const std::string& relation, const Tuple& t) {
        auto& cols = columns[relation];
        if (cols.size() < t.size()) cols.resize(t.size());
        for (std::size_t k = 0; k < t.size(); ++k) cols[k][t[k]].insert(&t);
    }
};

namespace {
std::mutex index_mutex;
}

Instance& Instance::operator=(const Instance& other) {
    if (this != &other) {
        drop_index();
        by_relation_ = other.by_relation_;
    }
    return *this;
}

Instance& Instance::operator=(Instance&& other) noexcept {
    if (this != &other) {
        drop_index();
        other.drop_index();
        by_relation_ = std::move(other.by_relation_);
    }
    return *this;
}

Instance::~Instance() { drop_index(); }

void Instance::drop_index() noexcept { delete index_.exchange(nullptr); }

void Instance::build_index() const {
    std::lock_guard<std::mutex> lock(index_mutex);
    if (index_.load(std::memory_order_acquire)) return;
    auto idx = std::make_unique<Index>();
    for (const auto& [rel, tuples] : by_relation_)
        for (const auto& t : tuples) idx->insert(rel, t);
    index_.store(idx.release(), std::memory_order_release);
}

const Instance::Column* Instance::column(const std::string& relation, std::size_t position, const Term& value) const {
    if (!index_.load(std::memory_order_acquire)) build_index();
    const Index* idx = index_.load(std::memory_order_acquire);
    auto it = idx->columns.find(relation);
    if (it == idx->columns.end() || position >= it->second.size()) return nullptr;
    auto jt = it->second[position].find(value);
    return jt == it->second[position].end() ? nullptr : &jt->second;
}

bool Instance::add(const std::string& relation, Tuple tuple) {
    auto [it, inserted] = by_relation_[relation].insert(std::move(tuple));
    if (inserted)
        if (Index* idx = index_.load(std::memory_order_relaxed)) idx->insert(relation, *it);
    return inserted;
}

bool Instance::contains(const Atom& fact) const {
    auto it = by_relation_.find(fact.relation);
    return it != by_relation_.end() && it->second.count(fact.args) > 0;
}

void Instance::add_all(const Instance& other) {
    for (const auto& [rel, tuples] : other.by_relation_)
        for (const auto& t : tuples) add(rel, t);
}

const TupleSet& Instance::tuples(const std::string& relation) const {
    static const TupleSet kEmpty;
    auto it = by_relation_.find(relation);
    return it == by_relation_.end() ? kEmpty : it->second;
}

std::vector<Atom> Instance::facts() const {
    std::vector<Atom> out;
    for (const auto& [rel, tuples] : by_relation_)
        for (const auto& t : tuples) out.emplace_back(rel, t);
    return out;
}

std::size_t Instance::size() const {
    std::size_t n = 0;
    for (const auto& [rel, tuples] : by_relation_) n += tuples.size();
    return n;
}

Instance Instance::substitute(const Term& from, const Term& to) const {
    Instance out;
    for (const auto& [rel, tuples] : by_relation_) {
        out.by_relation_[rel];
        for (auto t : tuples) {
            for (auto& x : t)
                if (x == from) x = to;
            out.add(rel, std::move(t));
        }
    }
    return out;
}

std::string Instance::to_string() const {
    std::string out = "{";
    bool first = true;
    for (const auto& f : facts()) {
        if (!first) out += ", ";
        first = false;
        out += f.to_string(false);
    }
    return out + "}";
}

bool operator==(const Instance& a, const Instance& b) {
    // Empty relation entries do not count.
    auto nonempty = [](const Instance& i) {
        std::size_t n = 0;
        for (const auto& [rel, t] : i.by_relation_) n += t.empty() ? 0 : 1;
        return n;
    };
    if (nonempty(a) != nonempty(b)) return false;
    for (const auto& [rel, tuples] : a.by_relation_) {
        if (tuples.empty()) continue;
        if (b.tuples(rel) != tuples) return false;
    }
    return true;
}

DInstance DInstance::distribute(const DSchema& schema, const Instance& global) {
    DInstance d;
    for (const auto& s : schema.sources()) d.locals_[s];
    for (const auto& f : global.facts()) {
        const auto* rel = schema.find(f.relation);
        if (!rel) throw InputError("fact over unknown relation '" + f.relation + "'");
        for (const auto& s : rel->sources) d.locals_[s].add(f);
    }
    return d;
}

void DInstance::add(const std::string& source, const Atom& fact) { locals_[source].add(fact); }

const Instance& DInstance::local(const std::string& source) const {
    static const Instance kEmpty;
    auto it = locals_.find(source);
    return it == locals_.end() ? kEmpty : it->second;
}

Instance DInstance::global() const {
    Instance out;
    for (const auto& [s, i] : locals_) out.add_all(i);
    return out;
}

std::vector<Term> variables_of(const std::vector<Atom>& atoms) {
    std::vector<Term> out;
    std::set<Term> seen;
    for (const auto& a : atoms)
        for (const auto& t : a.args)
            if (t.is_variable() && seen.insert(t).second) out.push_back(t);
    return out;
}

std::vector<Term> ConjunctiveQuery::variables() const { return variables_of(atoms); }

std::vector<Term> ConjunctiveQuery::existential_vars() const {
    std::vector<Term> out;
    for (const auto& v : variables())
        if (std::find(free_vars.begin(), free_vars.end(), v) == free_vars.end()) out.push_back(v);
    return out;
}

void ConjunctiveQuery::check() const {
    if (atoms.empty()) throw InputError("query '" + name + "' has an empty body");
    for (const auto& a : atoms)
        for (const auto& t : a.args)
            if (t.is_null() || t.is_pair())
                throw InputError("query '" + name + "' has a null or pair argument in " + a.to_string());
    auto vars = variables();
    std::set<Term> seen;
    for (const auto& v : free_vars) {
        if (!v.is_variable()) throw InputError("query '" + name + "' has a non-variable head term");
        if (!seen.insert(v).second) throw InputError("query '" + name + "' repeats head variable " + v.name());
        if (std::find(vars.begin(), vars.end(), v) == vars.end())
            throw InputError("head variable " + v.name() + " of query '" + name + "' does not occur in its body");
    }
}

namespace {
std::string join_atoms(const std::vector<Atom>& atoms) {
    std::string out;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (i) out += ", ";
        out += atoms[i].to_string(true);
    }
    return out;
}

std::string join_terms(const std::vector<Term>& terms) {
    std::string out;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (i) out += ",";
        out += format_term(terms[i], true);
    }
    return out;
}
}  // namespace

std::string ConjunctiveQuery::to_string() const {
    std::string out = name;
    if (!free_vars.empty()) out += "(" + join_terms(free_vars) + ")";
    return out + " := " + join_atoms(atoms);
}

std::vector<Term> ExistentialRule::body_vars() const { return variables_of(body); }

std::vector<Term> ExistentialRule::frontier() const {
    auto bv = body_vars();
    std::vector<Term> out;
    for (const auto& v : variables_of(head))
        if (std::find(bv.begin(), bv.end(), v) != bv.end()) out.push_back(v);
    return out;
}

std::vector<Term> ExistentialRule::existential_vars() const {
    auto bv = body_vars();
    std::vector<Term> out;
    for (const auto& v : variables_of(head))
        if (std::find(bv.begin(), bv.end(), v) == bv.end()) out.push_back(v);
    return out;
}

void ExistentialRule::check() const {
    if (body.empty()) throw InputError("rule '" + name + "' has an empty body");
    auto bv = body_vars();
    auto in_body = [&](const Term& t) { return std::find(bv.begin(), bv.end(), t) != bv.end(); };
    if (equality) {
        if (!head.empty()) throw InputError("equality rule '" + name + "' cannot also have head atoms");
        for (const auto* t : {&equality->first, &equality->second})
            if (t->is_variable() ? !in_body(*t) : !t->is_constant())
                throw InputError("equality rule '" + name + "' must equate body variables or constants");
    } else if (head.empty()) {
        throw InputError("rule '" + name + "' has an empty head");
    }
    for (const auto& a : body)
        for (const auto& t : a.args)
            if (t.is_null() || t.is_pair()) throw InputError("rule '" + name + "' mentions a null or pair");
}

std::string ExistentialRule::to_string() const {
    std::string out = name + " := " + join_atoms(body) + " -> ";
    if (equality) return out + format_term(equality->first, true) + " = " + format_term(equality->second, true);
    auto ex = existential_vars();
    if (!ex.empty()) out += "exists " + join_terms(ex) + " . ";
    return out + join_atoms(head);
}

Term frozen(const Term& variable) { return Term::constant("c_" + variable.name()); }

Instance build_canondb(const std::vector<Atom>& atoms) {
    Instance out;
    for (const auto& a : atoms) {
        Tuple t;
        t.reserve(a.args.size());
        for (const auto& x : a.args) t.push_back(x.is_variable() ? frozen(x) : x);
        out.add(a.relation, std::move(t));
    }
    return out;
}

Instance build_canondb(const ConjunctiveQuery& q) { return build_canondb(q.atoms); }

std::set<Term> active_domain(const Instance& i) {
    std::set<Term> out;
    for (const auto& [rel, tuples] : i.relations())
        for (const auto& t : tuples) out.insert(t.begin(), t.end());
    return out;
}

Atom substitute(const Atom& atom, const std::map<Term, Term>& mapping) {
    Atom out = atom;
    for (auto& t : out.args) {
        auto it = mapping.find(t);
        if (it != mapping.end()) t = it->second;
    }
    return out;
}

std::vector<Atom> substitute(const std::vector<Atom>& atoms, const std::map<Term, Term>& mapping) {
    std::vector<Atom> out;
    out.reserve(atoms.size());
    for (const auto& a : atoms) out.push_back(substitute(a, mapping));
    return out;
}

std::vector<Violation> validate_dschema(const DSchema& schema, const DInstance& d) {
    std::vector<Violation> out;
    if (schema.sources().empty()) out.push_back({"source", "schema declares no source"});
    for (const auto& [source, local] : d.locals()) {
        if (!schema.has_source(source)) {
            out.push_back({"source", "instance has facts for unknown source '" + source + "'"});
            continue;
        }
        for (const auto& [rel, tuples] : local.relations()) {
            if (tuples.empty()) continue;
            const auto* sym = schema.find(rel);
            if (!sym) {
                out.push_back({"unknown-relation", "relation '" + rel + "' is not declared"});
                continue;
            }
            if (!sym->in_source(source))
                out.push_back({"source", "relation '" + rel + "' does not belong to source '" + source + "'"});
            for (const auto& t : tuples)
                if (t.size() != sym->arity)
                    out.push_back({"arity", "fact " + Atom(rel, t).to_string(false) + " has arity " +
                                                std::to_string(t.size()) + ", expected " +
                                                std::to_string(sym->arity)});
        }
    }
    for (const auto& rel : schema.replicated()) {
        const auto& first = d.local(rel.sources.front()).tuples(rel.name);
        for (std::size_t i = 1; i < rel.sources.size(); ++i)
            if (d.local(rel.sources[i]).tuples(rel.name) != first)
                out.push_back({"replication", "replicated relation '" + rel.name + "' differs between '" +
                                                  rel.sources.front() + "' and '" + rel.sources[i] + "'"});
    }
    return out;
}

}  // namespace viewforge

std::size_t std::hash<viewforge::Term>::operator()(const viewforge::Term& t) const noexcept {
    using viewforge::TermKind;
    std::size_t h = static_cast<std::size_t>(t.kind()) * 0x9e3779b97f4a7c15ULL;
    switch (t.kind()) {
    case TermKind::Constant:
    case TermKind::Variable: return h ^ std::hash<std::string>{}(t.name());
    case TermKind::Null: return h ^ std::hash<std::int64_t>{}(t.null_id());
    case TermKind::Pair: {
        std::size_t l = (*this)(t.left());
        std::size_t r = (*this)(t.right());
        return h ^ (l * 31 + r);
    }
    }
    return h;
}
