#pragma once

#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "viewforge/model.hpp"

namespace viewforge {

struct GuardLiteral {
    Term lhs;
    Term rhs;
    bool equal = true;

    std::string to_string() const;
    friend bool operator==(const GuardLiteral&, const GuardLiteral&) = default;
};

/// Disjunction of conjunctions sharing one head. Disjuncts need not mention
/// every head variable (the query may be unsafe); missing head variables
/// range over the evaluation domain.
struct DisjunctiveQuery {
    std::vector<Term> head;
    std::vector<std::vector<Atom>> disjuncts;
    std::vector<GuardLiteral> guard;

    friend bool operator==(const DisjunctiveQuery&, const DisjunctiveQuery&) = default;
};

struct RaExpr;
using RaPtr = std::shared_ptr<const RaExpr>;

struct RaQuery {
    RaPtr expr;
    friend bool operator==(const RaQuery& a, const RaQuery& b);
};

using ViewDefinition = std::variant<ConjunctiveQuery, DisjunctiveQuery, RaQuery>;

struct View {
    std::string name;
    std::string source;
    ViewDefinition definition;

    bool is_cq() const { return std::holds_alternative<ConjunctiveQuery>(definition); }
    bool is_dcq() const { return std::holds_alternative<DisjunctiveQuery>(definition); }
    bool is_ra() const { return std::holds_alternative<RaQuery>(definition); }
    const ConjunctiveQuery& cq() const { return std::get<ConjunctiveQuery>(definition); }
    const DisjunctiveQuery& dcq() const { return std::get<DisjunctiveQuery>(definition); }
    const RaQuery& ra() const { return std::get<RaQuery>(definition); }

    /// Output columns as variables (RA attributes become variables).
    std::vector<Term> head() const;
    std::size_t arity() const { return head().size(); }
    /// Relations read by the definition.
    std::set<std::string> relations() const;
    /// Workspace syntax for CQ/DCQ views, lisp form for RA views.
    std::string to_string() const;

    friend bool operator==(const View&, const View&) = default;
};

struct DView {
    std::string name;
    std::vector<View> views;

    std::vector<const View*> of_source(const std::string& source) const;
    bool all_cq() const;
    friend bool operator==(const DView&, const DView&) = default;
};

/// Throws InputError unless every relation of the view belongs to (or is
/// replicated into) its source and the definition is well formed.
void check_view(const View& v, const DSchema& schema);

/// `base` plus `fresh` new constants #pad1, #pad2, ... not in `base`.
std::set<Term> padded_domain(const std::set<Term>& base, std::size_t fresh);

/// Evaluates any view. DCQ views range unbound head variables over
/// `domain`, which must contain adom(i); when null, adom(i) padded with
/// arity-many fresh elements is used.
TupleSet eval_view(const View& v, const Instance& i, const std::set<Term>* domain = nullptr);

/// One image per view, in DView order.
std::vector<TupleSet> view_images(const DView& dv, const Instance& i, const std::set<Term>* domain = nullptr);

/// Largest view arity in the d-view.
std::size_t max_arity(const DView& dv);

}  // namespace viewforge
