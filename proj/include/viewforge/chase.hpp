#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "viewforge/homomorphism.hpp"
#include "viewforge/model.hpp"

namespace viewforge {

/// An equality rule demanded that two distinct constants be equal.
class EqualityClash : public std::runtime_error {
  public:
    EqualityClash(Term a, Term b);
    const Term& lhs() const { return lhs_; }
    const Term& rhs() const { return rhs_; }

  private:
    Term lhs_;
    Term rhs_;
};

/// Source of fresh labeled nulls. Share one pool across the chase runs of a
/// single procedure to keep ids distinct.
class NullPool {
  public:
    Term fresh(const std::string& label) { return Term::null(next_++, label); }
    std::int64_t issued() const { return next_ - 1; }

  private:
    std::int64_t next_ = 1;
};

struct ChaseConfig {
    std::size_t max_steps = 100000;
    /// Inserted into null labels: n_<prefix><step>_<var>.
    std::string null_prefix;
    /// More queued triggers than this also ends the chase unfinished.
    std::size_t max_pending = 200000;
};

struct ChaseStep {
    std::size_t rule_index = 0;
    std::string rule_name;
    Assignment trigger;
    std::vector<Atom> emitted;
    std::optional<std::pair<Term, Term>> merged;  // (removed, kept)
};

struct ChaseResult {
    bool completed = false;
    Instance instance;
    /// Triggers still queued when fuel ran out (0 when completed).
    std::size_t pending_triggers = 0;
    std::vector<ChaseStep> trace;
};

/// FIFO chase. Triggers are re-checked for activity when popped; inactive
/// ones are dropped without consuming fuel. Throws EqualityClash.
ChaseResult run_chase(const Instance& start, std::span<const ExistentialRule> rules, const ChaseConfig& cfg = {},
                      NullPool* pool = nullptr);

/// Re-applies the recorded steps to `start`.
Instance replay_trace(const Instance& start, std::span<const ChaseStep> trace);

/// True iff every rule is satisfied by the instance.
bool satisfies(const Instance& i, std::span<const ExistentialRule> rules);

struct Position {
    std::string relation;
    std::size_t index = 0;
    friend auto operator<=>(const Position&, const Position&) = default;
    std::string to_string() const { return relation + "[" + std::to_string(index + 1) + "]"; }
};

struct DependencyEdge {
    Position from;
    Position to;
    bool special = false;
    std::string rule;
};

struct WeakAcyclicityReport {
    bool weakly_acyclic = true;
    std::vector<DependencyEdge> edges;
    /// Special edges lying on a cycle.
    std::vector<DependencyEdge> offending;
};

/// Position dependency graph test. Throws InputError on equality rules.
WeakAcyclicityReport is_weakly_acyclic(std::span<const ExistentialRule> rules);

std::string trace_to_jsonl(std::span<const ChaseStep> trace);

}  // namespace viewforge
