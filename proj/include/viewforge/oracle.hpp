#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "viewforge/model.hpp"
#include "viewforge/view.hpp"

namespace viewforge {

struct OracleBounds {
    std::size_t domain_size = 2;
    std::size_t max_facts = 2;
    /// Worker threads for view-image computation; results do not depend on it.
    std::size_t jobs = 1;
};

/// d1 ... dk
std::vector<Term> oracle_domain(std::size_t k);

/// Relations of the whole schema, or of one source when given.
std::vector<RelationSymbol> oracle_relations(const DSchema& schema, const std::string& source = {});

/// Every instance over d1..dk with at most m facts per relation that
/// satisfies the rules, in a fixed lexicographic order.
std::vector<Instance> enumerate_instances(std::span<const RelationSymbol> rels, std::size_t k, std::size_t m,
                                          std::span<const ExistentialRule> rules = {});

/// Image equality under the padded evaluation domain.
bool views_agree(const DView& dv, const Instance& d1, const Instance& d2);

struct SqEquivalence {
    bool equivalent = true;
    /// On failure: the canonical context built from a match on one side
    /// that the other side cannot complete.
    bool left_side = true;
    std::vector<Term> match;
    Instance context;
};

/// Exact (s,q)-equivalence through canonical contexts. q Boolean.
SqEquivalence sq_equivalence_exact(const Instance& i1, const Instance& i2, const ConjunctiveQuery& q,
                                   const std::string& s, const DSchema& schema);

struct DeterminacyRefutation {
    bool found = false;
    Instance left;
    Instance right;
    std::size_t examined = 0;
};

DeterminacyRefutation refute_determinacy(const ConjunctiveQuery& q, const DView& dv, const DSchema& schema,
                                         const OracleBounds& bounds, std::span<const ExistentialRule> rules = {});

struct OracleDisclosure {
    bool disclosing = false;
    Instance witness;
    /// The secret answer known with certainty.
    std::vector<Term> answer;
    std::size_t examined = 0;
};

/// Disclosing when some instance has a secret answer shared by every
/// bounded instance with the same view image. Never claims non-disclosure.
OracleDisclosure check_un_disclosure_oracle(const DView& dv, const ConjunctiveQuery& p, const DSchema& schema,
                                            const OracleBounds& bounds, std::span<const ExistentialRule> rules = {});

/// Parallel map preserving order.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& body);

}  // namespace viewforge
