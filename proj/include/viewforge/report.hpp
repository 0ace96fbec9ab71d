#pragma once

#include <string>
#include <vector>

#include "viewforge/determinacy.hpp"
#include "viewforge/disclosure.hpp"
#include "viewforge/json_io.hpp"
#include "viewforge/minimization.hpp"
#include "viewforge/oracle.hpp"
#include "viewforge/replication.hpp"
#include "viewforge/shuffle_views.hpp"
#include "viewforge/workspace.hpp"

namespace viewforge {

inline constexpr int kReportVersion = 1;

Json to_json(const ConjunctiveQuery& q);
Json to_json(const View& v);
Json to_json(const DView& dv);
Json to_json(const DInstance& d);
DInstance dinstance_from_json(const Json& j);
Json to_json(const MinimalityReport& r);

/// Verdict objects carry a "check" entry that verify_report re-validates.
Json to_json(const DeterminacyVerdict& v, const ConjunctiveQuery& q, const DView& dv);
Json to_json(const DisclosureVerdict& v, const ConjunctiveQuery& p, const DView& dv);
Json to_json(const UsefulNonDisclosing& u, const ConjunctiveQuery& p);
Json to_json(const ShuffleDesign& d);
Json to_json(const FullRepReport& r, const ConjunctiveQuery& q, const ConjunctiveQuery& p);
Json to_json(const StrEquivalence& e);
Json to_json(const SqEquivalence& e);
Json to_json(const DeterminacyRefutation& r, const ConjunctiveQuery& q, const DView& dv);
Json to_json(const OracleDisclosure& r, const ConjunctiveQuery& p, const DView& dv);

/// {"viewforge_report": 1, "command": ..., "workspace": printed text}
Json report_header(const Workspace& ws, const std::string& command);

enum class DesignClass { CQ, All, Replication };
DesignClass parse_design_class(const std::string& text);
std::string to_string(DesignClass c);

struct DesignConfig {
    ChaseConfig chase;
    ShuffleConfig shuffle;
    OracleBounds bounds;
    bool oracle_evidence = true;
};

struct DesignReport {
    Tri answer = Tri::Unknown;
    std::string headline;
    /// Stage that prevented a definitive answer.
    std::string limiting_stage;
    std::vector<std::string> notes;
    Json json;
};

std::string design_headline(Tri answer);

DesignReport run_design(const Workspace& ws, const std::string& query, const std::vector<std::string>& secrets,
                        DesignClass cls, const DesignConfig& cfg = {});

struct VerifyCheck {
    std::string kind;
    std::string path;
    bool ok = false;
    std::string detail;
};

/// Re-validates every embedded witness from the report's own workspace
/// text, without rerunning the procedures that produced it.
std::vector<VerifyCheck> verify_report(const Json& report);

}  // namespace viewforge
