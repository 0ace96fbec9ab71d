#pragma once

#include <span>
#include <string>
#include <vector>

#include "viewforge/chase.hpp"
#include "viewforge/minimization.hpp"
#include "viewforge/model.hpp"
#include "viewforge/view.hpp"

namespace viewforge {

Term critical_element();
/// One all-star fact per relation.
Instance critical_facts(const DSchema& schema);
DInstance critical_instance(const DSchema& schema);

enum class DisclosureOutcome { Disclosing, NonDisclosing, Unknown };
std::string to_string(DisclosureOutcome o);

struct DisclosureVerdict {
    DisclosureOutcome outcome = DisclosureOutcome::Unknown;
    /// Final instance of the critical chase (nulls kept).
    Instance certificate;
    /// Disclosing: match of the secret into the certificate.
    Assignment secret_match;
    /// NonDisclosing: certificate with nulls promoted to fresh constants.
    Instance witness;
    std::string reason;
};

/// Critical-instance procedure for CQ views. Secrets with free variables
/// are checked with every free variable sent to the critical element.
DisclosureVerdict check_un_disclosure_cq(const DView& dv, const ConjunctiveQuery& p, const DSchema& schema,
                                         std::span<const ExistentialRule> rules = {}, const ChaseConfig& cfg = {});

/// Empty string when the witness has the critical view image and the
/// secret fails on it at the critical tuple.
std::string validate_nondisclosure_witness(const DView& dv, const ConjunctiveQuery& p, const DSchema& schema,
                                           const Instance& witness, std::span<const ExistentialRule> rules = {});

struct SourceSecretVerdict {
    std::string source;
    ConjunctiveQuery secret_part;
    DisclosureVerdict verdict;
};

struct UsefulNonDisclosing {
    Tri answer = Tri::Unknown;
    std::string reason;
    ConjunctiveQuery minimized;
    DView design;
    std::vector<SourceSecretVerdict> per_source;
    /// Verdict on the whole secret, for the decomposition cross-check.
    DisclosureOutcome direct = DisclosureOutcome::Unknown;
    DisclosureVerdict direct_verdict;
    bool decomposition_consistent = true;
};

/// Does a useful CQ d-view exist that does not disclose p? q Boolean.
/// Answers through the canonical d-view of the minimized q; a Boolean p is
/// also split per source and cross-checked.
UsefulNonDisclosing exists_useful_nondisclosing_cq(const ConjunctiveQuery& q, const ConjunctiveQuery& p,
                                                   const DSchema& schema, std::span<const ExistentialRule> rules = {},
                                                   const ChaseConfig& cfg = {});

}  // namespace viewforge
