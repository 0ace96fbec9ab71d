#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "viewforge/chase.hpp"
#include "viewforge/minimization.hpp"
#include "viewforge/model.hpp"
#include "viewforge/view.hpp"

namespace viewforge {

class TooManyFrontierVars : public InputError {
  public:
    TooManyFrontierVars(std::size_t n, std::size_t cap)
        : InputError(std::to_string(n) + " source-join variables exceed the shuffle cap of " + std::to_string(cap)) {}
};

/// A partition of the frontier, as a restricted growth string.
struct EqualityType {
    std::vector<Term> vars;
    std::vector<std::size_t> block_of;

    std::size_t block_count() const;
    /// Index of the first variable of the block.
    std::size_t rep(std::size_t var_index) const;
    /// x = rep for non-representatives, rep != rep for distinct blocks.
    std::vector<GuardLiteral> guard() const;
    /// Fresh constant standing for the block of the variable.
    Term block_constant(std::size_t var_index) const;
    std::string to_string() const;

    /// Exact type of a tuple of values.
    static EqualityType of_values(const std::vector<Term>& vars, const std::vector<Term>& values);
    friend bool operator==(const EqualityType&, const EqualityType&) = default;
};

/// Frontier index -> frontier index.
struct Shuffle {
    std::vector<std::size_t> image;
    bool is_identity() const;
    std::string to_string(const std::vector<Term>& vars) const;
    friend bool operator==(const Shuffle&, const Shuffle&) = default;
};

struct ShuffleConfig {
    std::size_t cap = 6;
    ChaseConfig chase;
};

struct TypesAndShuffles {
    std::string source;
    std::vector<Term> sjvars;
    std::vector<EqualityType> types;
    std::vector<Shuffle> shuffles;
};

/// All set partitions and all n^n maps, lexicographic. Throws
/// TooManyFrontierVars above the cap and InputError for unsupported queries.
TypesAndShuffles enumerate_types_and_shuffles(const ConjunctiveQuery& q, const std::string& s, const DSchema& schema,
                                              std::size_t cap = 6);

/// Checked at the most general binding of the type. With rules the target
/// is chased first.
Tri is_invariant_shuffle(const Shuffle& mu, const EqualityType& tau, const ConjunctiveQuery& q, const std::string& s,
                         const DSchema& schema, std::span<const ExistentialRule> rules = {},
                         const ShuffleConfig& cfg = {});

struct ShuffleView {
    std::string source;
    EqualityType type;
    /// Invariant shuffles kept after deduplication modulo the type.
    std::vector<Shuffle> shuffles;
    View view;
    /// Some invariance test ran out of fuel; those shuffles were left out.
    bool incomplete = false;
};

struct ShuffleDesign {
    std::vector<ShuffleView> views;
    bool incomplete = false;
    DView dview(const std::string& name = "shuffle") const;
};

ShuffleDesign build_shuffle_views(const ConjunctiveQuery& q, const DSchema& schema,
                                  std::span<const ExistentialRule> rules = {}, const ShuffleConfig& cfg = {});

struct ShuffleEquivalence {
    Tri verdict = Tri::Yes;
    /// On No: which side had the unmatched canonical-view answer.
    bool left_side = true;
    std::vector<Term> unmatched;
};

/// i1, i2 hold the s-relations.
ShuffleEquivalence shuffle_equivalent(const Instance& i1, const Instance& i2, const ConjunctiveQuery& q,
                                      const std::string& s, const DSchema& schema,
                                      std::span<const ExistentialRule> rules = {}, const ShuffleConfig& cfg = {});

Tri has_only_trivial_shuffles(const ConjunctiveQuery& q, const DSchema& schema,
                              std::span<const ExistentialRule> rules = {}, const ShuffleConfig& cfg = {});

/// Throws InputError unless q is Boolean, constant-free and avoids
/// replicated relations.
void check_shuffle_query(const ConjunctiveQuery& q, const DSchema& schema);

}  // namespace viewforge
