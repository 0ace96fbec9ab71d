#pragma once

#include <optional>
#include <string>
#include <vector>

#include "viewforge/homomorphism.hpp"
#include "viewforge/model.hpp"

namespace viewforge {

/// R((x1,y1),...,(xn,yn)) iff R(x) in a and R(y) in b.
Instance synchronous_product(const Instance& a, const Instance& b);

/// Element map of the first (or second) projection of a product.
Assignment projection(const Instance& product, bool first);

/// Both projections are homomorphisms onto the factors.
bool projections_are_homomorphisms(const Instance& product, const Instance& a, const Instance& b);

/// Smallest pair height among elements of the given relations; nullopt when
/// they are empty.
std::optional<int> min_pair_height(const Instance& i, const std::set<std::string>& relations);

/// Product of each local instance with canondb(q) restricted to the
/// relations of that source.
DInstance str_transform(const DInstance& d, const ConjunctiveQuery& q, const DSchema& schema);
Instance str_local(const Instance& local, const ConjunctiveQuery& q, const std::string& source, const DSchema& schema);

struct FullRepReport {
    bool applicable = false;
    std::string reason;
    std::string replicated_relation;
    /// Demonstration on d = canondb(q).
    DInstance sample;
    DInstance str1;
    DInstance str2;
    bool projections_ok = false;
    bool secret_fails = false;
    bool query_preserved = false;
    std::optional<int> height_before;
    std::optional<int> height_after;
};

FullRepReport fullrep_design(const ConjunctiveQuery& q, const ConjunctiveQuery& p, const DSchema& schema);

struct StrEquivalence {
    /// Per source: iterate count when equivalent.
    std::map<std::string, std::optional<std::size_t>> per_source;
    bool per_source_all = false;
    /// Same iterate on all sources at once.
    std::optional<std::size_t> global;
    /// When d satisfies q and both inputs satisfy replication, whether the
    /// per-source and global relations agree.
    std::optional<bool> coincidence;
};

StrEquivalence str_equivalent(const DInstance& d, const DInstance& d2, const ConjunctiveQuery& q,
                              const DSchema& schema, std::size_t max_iter);

}  // namespace viewforge
