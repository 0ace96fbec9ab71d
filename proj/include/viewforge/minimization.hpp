#pragma once

#include <optional>
#include <span>
#include <string>

#include "viewforge/chase.hpp"
#include "viewforge/homomorphism.hpp"
#include "viewforge/model.hpp"

namespace viewforge {

enum class Tri { Yes, No, Unknown };
std::string to_string(Tri t);

struct MinimalityReport {
    bool minimal = true;
    /// When not minimal: an endomorphism of q onto `subquery` (identity on
    /// free variables), variables to terms.
    std::optional<Assignment> folding;
    std::optional<ConjunctiveQuery> subquery;
};

MinimalityReport is_minimal(const ConjunctiveQuery& q);

/// Greedy atom deletion in syntactic order. Duplicate atoms are dropped first.
ConjunctiveQuery minimize(const ConjunctiveQuery& q);

/// Both q ∧ Σ ⊨ q2 and q2 ∧ Σ ⊨ q, via chasing the canonical databases.
/// Free variables are matched positionally. Throws EqualityClash.
Tri equivalent_under_rules(const ConjunctiveQuery& q, const ConjunctiveQuery& q2,
                           std::span<const ExistentialRule> rules, const ChaseConfig& cfg = {});

/// q ∧ Σ ⊨ q2 only.
Tri entails_under_rules(const ConjunctiveQuery& q, const ConjunctiveQuery& q2, std::span<const ExistentialRule> rules,
                        const ChaseConfig& cfg = {});

/// nullopt when some needed test ran out of fuel.
std::optional<ConjunctiveQuery> minimize_under_rules(const ConjunctiveQuery& q, std::span<const ExistentialRule> rules,
                                                     const ChaseConfig& cfg = {});

}  // namespace viewforge
