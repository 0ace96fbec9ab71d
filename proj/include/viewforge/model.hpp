#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <atomic>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace viewforge {

/// Raised for malformed inputs (arity mismatches, unknown relations, ...).
class InputError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class TermKind : std::uint8_t { Constant, Variable, Null, Pair };

/// A domain element or query variable. Terms are immutable values.
///
/// Constants and variables are identified by name, labeled nulls by their
/// numeric id (the label is for display only), pairs structurally.
class Term {
  public:
    Term() = default;

    static Term constant(std::string name);
    static Term variable(std::string name);
    static Term null(std::int64_t id, std::string label);
    static Term pair(Term left, Term right);

    TermKind kind() const { return kind_; }
    bool is_constant() const { return kind_ == TermKind::Constant; }
    bool is_variable() const { return kind_ == TermKind::Variable; }
    bool is_null() const { return kind_ == TermKind::Null; }
    bool is_pair() const { return kind_ == TermKind::Pair; }

    /// Name of a constant/variable, or the display label of a null.
    const std::string& name() const { return name_; }
    std::int64_t null_id() const { return id_; }
    const Term& left() const;
    const Term& right() const;

    /// 0 for atomic terms; max(left, right) + 1 for pairs.
    int pair_height() const;

    std::string to_string() const;

    friend bool operator==(const Term& a, const Term& b);
    friend std::strong_ordering operator<=>(const Term& a, const Term& b);

  private:
    TermKind kind_ = TermKind::Constant;
    std::string name_;
    std::int64_t id_ = 0;
    std::shared_ptr<const std::pair<Term, Term>> pair_;
};

struct RelationSymbol {
    std::string name;
    std::size_t arity = 0;
    /// One entry for a local relation, two or more for a replicated one.
    std::vector<std::string> sources;

    bool replicated() const { return sources.size() > 1; }
    bool in_source(const std::string& source) const;
    friend bool operator==(const RelationSymbol&, const RelationSymbol&) = default;
};

/// A relational schema partitioned across sources.
class DSchema {
  public:
    void add_source(const std::string& source);
    /// Throws InputError on duplicate names, unknown sources or a
    /// replicated symbol with fewer than two sources.
    void add_relation(RelationSymbol rel);

    const std::vector<std::string>& sources() const { return sources_; }
    const std::vector<RelationSymbol>& relations() const { return relations_; }
    bool has_source(const std::string& source) const;
    const RelationSymbol* find(const std::string& name) const;
    const RelationSymbol& at(const std::string& name) const;
    std::vector<RelationSymbol> relations_of(const std::string& source) const;
    std::vector<RelationSymbol> replicated() const;

    friend bool operator==(const DSchema&, const DSchema&) = default;

  private:
    std::vector<std::string> sources_;
    std::vector<RelationSymbol> relations_;
};

struct Atom {
    std::string relation;
    std::vector<Term> args;

    Atom() = default;
    Atom(std::string rel, std::vector<Term> arguments) : relation(std::move(rel)), args(std::move(arguments)) {}
    /// Checks the argument count against the symbol's arity.
    Atom(const RelationSymbol& rel, std::vector<Term> arguments);

    std::string to_string(bool quote_constants = true) const;

    friend bool operator==(const Atom&, const Atom&) = default;
    friend auto operator<=>(const Atom&, const Atom&) = default;
};

using Tuple = std::vector<Term>;
using TupleSet = std::set<Tuple>;

/// A finite set of facts indexed by relation name.
class Instance {
  public:
    Instance() = default;
    explicit Instance(const std::vector<Atom>& facts);
    Instance(const Instance& other) : by_relation_(other.by_relation_) {}
    Instance(Instance&& other) noexcept : by_relation_(std::move(other.by_relation_)) { other.drop_index(); }
    Instance& operator=(const Instance& other);
    Instance& operator=(Instance&& other) noexcept;
    ~Instance();

    bool add(const Atom& fact);
    bool add(const std::string& relation, Tuple tuple);
    bool contains(const Atom& fact) const;
    void add_all(const Instance& other);

    const TupleSet& tuples(const std::string& relation) const;
    const std::map<std::string, TupleSet>& relations() const { return by_relation_; }
    std::vector<Atom> facts() const;
    std::size_t size() const;
    bool empty() const { return size() == 0; }

    /// Facts whose relation satisfies the predicate.
    template <typename Pred> Instance filter(Pred keep) const {
        Instance out;
        for (const auto& [rel, tuples] : by_relation_) {
            if (!keep(rel)) continue;
            for (const auto& t : tuples) out.add(rel, t);
        }
        return out;
    }

    /// Replaces every occurrence of `from` by `to`.
    Instance substitute(const Term& from, const Term& to) const;
    std::string to_string() const;

    struct TuplePtrLess {
        bool operator()(const Tuple* a, const Tuple* b) const { return *a < *b; }
    };
    using Column = std::set<const Tuple*, TuplePtrLess>;
    /// Tuples of `relation` with `value` at `position`, in tuple order;
    /// nullptr when there are none.
    const Column* column(const std::string& relation, std::size_t position, const Term& value) const;

    friend bool operator==(const Instance& a, const Instance& b);

  private:
    struct Index;
    void build_index() const;
    void drop_index() noexcept;
    std::map<std::string, TupleSet> by_relation_;
    mutable std::atomic<Index*> index_{nullptr};
};

/// A d-instance: one local instance per source. Replicated relations are
/// stored once per member source.
class DInstance {
  public:
    DInstance() = default;

    /// Places every fact in each source owning its relation.
    static DInstance distribute(const DSchema& schema, const Instance& global);

    void add(const std::string& source, const Atom& fact);
    const Instance& local(const std::string& source) const;
    const std::map<std::string, Instance>& locals() const { return locals_; }
    Instance& local_mut(const std::string& source) { return locals_[source]; }
    /// Union of all local instances.
    Instance global() const;

    friend bool operator==(const DInstance&, const DInstance&) = default;

  private:
    std::map<std::string, Instance> locals_;
};

struct ConjunctiveQuery {
    std::string name;
    std::vector<Term> free_vars;
    std::vector<Atom> atoms;

    bool is_boolean() const { return free_vars.empty(); }
    /// Variables in order of first occurrence in the atoms.
    std::vector<Term> variables() const;
    std::vector<Term> existential_vars() const;
    /// Throws InputError if free variables do not occur in the body or a
    /// body argument is a null or pair.
    void check() const;
    std::string to_string() const;

    friend bool operator==(const ConjunctiveQuery&, const ConjunctiveQuery&) = default;
};

/// TGD `body -> exists z. head`, or an equality rule `body -> lhs = rhs`.
struct ExistentialRule {
    std::string name;
    std::vector<Atom> body;
    std::vector<Atom> head;
    std::optional<std::pair<Term, Term>> equality;

    bool is_tgd() const { return !equality.has_value(); }
    std::vector<Term> body_vars() const;
    std::vector<Term> frontier() const;
    std::vector<Term> existential_vars() const;
    void check() const;
    std::string to_string() const;

    friend bool operator==(const ExistentialRule&, const ExistentialRule&) = default;
};

/// Frozen copy of a query: one fact per atom, variable v becomes c_v.
Instance build_canondb(const ConjunctiveQuery& q);
Instance build_canondb(const std::vector<Atom>& atoms);
Term frozen(const Term& variable);
std::set<Term> active_domain(const Instance& i);

/// Replaces variables according to the map; other terms are kept.
Atom substitute(const Atom& atom, const std::map<Term, Term>& mapping);
std::vector<Atom> substitute(const std::vector<Atom>& atoms, const std::map<Term, Term>& mapping);
/// Variables of the atoms in first-occurrence order.
std::vector<Term> variables_of(const std::vector<Atom>& atoms);

std::string format_term(const Term& t, bool quote_constants);

struct Violation {
    std::string kind;  // "arity", "unknown-relation", "replication", "source"
    std::string message;
};

/// Structural check of a d-instance against its schema. Never throws.
std::vector<Violation> validate_dschema(const DSchema& schema, const DInstance& d);

}  // namespace viewforge

template <> struct std::hash<viewforge::Term> {
    std::size_t operator()(const viewforge::Term& t) const noexcept;
};
