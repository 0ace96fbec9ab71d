#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "viewforge/model.hpp"

namespace viewforge {

/// Partial map from source terms to target terms.
using Assignment = std::map<Term, Term>;

struct HomOptions {
    /// Labeled nulls in the source may be mapped (instance-to-instance
    /// homomorphisms). When false they must map to themselves.
    bool map_nulls = true;
    /// Distinct flexible source terms go to distinct target terms.
    bool injective = false;
};

/// Backtracking search for h with h(src) ⊆ dst extending `pinned`.
/// Variables (and nulls, per options) are flexible; constants and pairs map
/// to themselves. The first solution in a deterministic search order is
/// returned.
std::optional<Assignment> find_homomorphism(std::span<const Atom> src, const Instance& dst,
                                            const Assignment& pinned = {}, HomOptions opts = {});

/// Calls `visit` on every homomorphism; stop early by returning false.
void for_each_homomorphism(std::span<const Atom> src, const Instance& dst, const Assignment& pinned,
                           HomOptions opts, const std::function<bool(const Assignment&)>& visit);

/// Answers of q on i: the projections onto q.free_vars of all matches.
/// A Boolean query yields {()} iff it has a match.
TupleSet enumerate_matches(const ConjunctiveQuery& q, const Instance& i);
bool holds(const ConjunctiveQuery& q, const Instance& i);

/// Homomorphism between queries: `from` into canondb(to), with the i-th free
/// variable of `from` pinned to c_v of the i-th free variable of `to`.
std::optional<Assignment> find_cq_homomorphism(const ConjunctiveQuery& from, const ConjunctiveQuery& to);
/// Both directions exist.
bool hom_equivalent(const ConjunctiveQuery& a, const ConjunctiveQuery& b);

/// True iff h maps every source atom to a fact of dst.
bool is_homomorphism(std::span<const Atom> src, const Instance& dst, const Assignment& h);

}  // namespace viewforge
