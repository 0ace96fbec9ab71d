#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "viewforge/chase.hpp"
#include "viewforge/model.hpp"
#include "viewforge/view.hpp"

namespace viewforge {

class NonCQView : public InputError {
  public:
    explicit NonCQView(const std::string& view) : InputError("view '" + view + "' is not defined by a CQ") {}
};

struct ViewRuleSet {
    std::vector<ExistentialRule> for_view;
    std::vector<ExistentialRule> back_view;
    std::vector<ExistentialRule> for_view_primed;
    std::vector<ExistentialRule> back_view_primed;
    /// relation -> primed relation
    std::map<std::string, std::string> prime_map;
};

/// Relation name used for the facts of a view.
std::string view_relation(const std::string& view);
std::string primed(const std::string& relation);

/// Throws NonCQView for DCQ or RA views.
ViewRuleSet make_view_rules(const DView& dv);

std::vector<ExistentialRule> prime_rules(std::span<const ExistentialRule> rules,
                                         const std::map<std::string, std::string>& prime_map);

/// Primed facts renamed back; unprimed facts dropped.
Instance unprime(const Instance& i, const std::map<std::string, std::string>& prime_map);

struct DeterminacyConfig {
    std::size_t max_rounds = 8;
    std::size_t fuel = 100000;
};

enum class DeterminacyOutcome { Determined, NotDetermined, Unknown };
std::string to_string(DeterminacyOutcome o);

struct RoundSnapshot {
    Instance f0;
    Instance f2;
    std::size_t f1_size = 0;
    std::size_t f3_size = 0;
    std::size_t f4_size = 0;
    std::size_t f5_size = 0;
};

struct DeterminacyVerdict {
    DeterminacyOutcome outcome = DeterminacyOutcome::Unknown;
    std::size_t round = 0;
    /// Determined: match of Q' into F2 (free v to c_v).
    Assignment match;
    /// NotDetermined: the stabilized F0 and UnPrime of the last F2. Both
    /// have the same view image; Q holds on the first at the frozen free
    /// variables and not on the second.
    Instance fixpoint;
    Instance witness_left;
    Instance witness_right;
    std::string reason;
    std::vector<RoundSnapshot> rounds;
};

DeterminacyVerdict check_determinacy(const ConjunctiveQuery& q, const DView& dv,
                                     std::span<const ExistentialRule> rules = {}, const DeterminacyConfig& cfg = {});

/// Independent check of a NotDetermined witness. Empty string when valid.
std::string validate_determinacy_witness(const ConjunctiveQuery& q, const DView& dv, const Instance& left,
                                         const Instance& right, std::span<const ExistentialRule> rules = {});

}  // namespace viewforge
