#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "viewforge/model.hpp"
#include "viewforge/view.hpp"

namespace viewforge {

enum class RaOp { Base, Join, Project, Select, Union, Difference, Rename };

struct SelectCondition {
    std::string lhs;
    /// Either another attribute or a constant.
    std::optional<std::string> rhs_attribute;
    std::optional<Term> rhs_constant;
    bool equal = true;

    friend bool operator==(const SelectCondition&, const SelectCondition&) = default;
};

/// Relational algebra over named attributes. Join is natural join on shared
/// attribute names; Union and Difference need equal attribute sets.
struct RaExpr {
    RaOp op = RaOp::Base;
    std::string relation;                       // Base
    std::vector<std::string> attributes;        // Base columns / Project list
    std::vector<SelectCondition> conditions;    // Select
    std::map<std::string, std::string> renames; // Rename: old -> new
    RaPtr left;
    RaPtr right;
};

RaPtr ra_base(std::string relation, std::vector<std::string> attributes);
RaPtr ra_join(RaPtr l, RaPtr r);
RaPtr ra_project(RaPtr e, std::vector<std::string> attributes);
RaPtr ra_select(RaPtr e, std::vector<SelectCondition> conditions);
RaPtr ra_union(RaPtr l, RaPtr r);
RaPtr ra_difference(RaPtr l, RaPtr r);
RaPtr ra_rename(RaPtr e, std::map<std::string, std::string> renames);

/// Output attributes in evaluation column order. Throws InputError on
/// malformed expressions (attribute mismatch, unknown attribute).
std::vector<std::string> ra_attributes(const RaExpr& e);

/// Lisp-like normal form, e.g. (diff (base T x y) (base T y x)).
std::string ra_to_string(const RaExpr& e);
bool ra_equal(const RaExpr& a, const RaExpr& b);

struct Relation {
    std::vector<std::string> attributes;
    TupleSet rows;
};

/// Set semantics. Throws InputError on attribute mismatch.
Relation eval_ra(const RaExpr& e, const Instance& i);

/// Unsafe-aware evaluation of a disjunctive query: all bindings of the head
/// into `domain` that satisfy the guard and some disjunct.
TupleSet eval_dcq(const DisjunctiveQuery& q, const Instance& i, const std::set<Term>& domain);

/// Splits a (possibly unsafe) DCQ view into one safe RA view per realized
/// variable set S: the S-disjuncts minus (antijoin) every disjunct whose
/// variable set is a strict subset of S. The result induces the same
/// indistinguishability relation as the input.
std::vector<View> compile_dcq_to_ra(const View& v);

}  // namespace viewforge
