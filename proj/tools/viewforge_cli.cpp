#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "viewforge/canonical_views.hpp"
#include "viewforge/ra.hpp"
#include "viewforge/report.hpp"

using namespace viewforge;

namespace {

constexpr int kDefinitive = 0;
constexpr int kUnknown = 2;
constexpr int kInputError = 3;

struct Shared {
    std::size_t fuel = 100000;
    std::size_t max_rounds = 8;
    std::size_t domain_size = 2;
    std::size_t max_facts = 2;
    std::size_t jobs = 1;
    bool json = false;
    bool trace = false;

    ChaseConfig chase() const {
        ChaseConfig c;
        c.max_steps = fuel;
        return c;
    }
    OracleBounds bounds() const { return {domain_size, max_facts, jobs}; }
};

struct Args {
    std::string file;
    std::string query;
    std::string view;
    std::string dview;
    std::string source;
    std::string left;
    std::string right;
    std::string cls = "cq";
    std::vector<std::string> secrets;
    std::size_t max_iter = 2;
};

void emit(const Shared& sh, const Json& j, const std::string& text) {
    if (sh.json) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << text;
    }
}

const ConjunctiveQuery& single_secret(const Workspace& ws, const Args& a) {
    if (a.secrets.size() != 1) throw InputError("exactly one --secret is required");
    return ws.secret(a.secrets.front());
}

int cmd_validate(const Shared& sh, const Args& a) {
    std::ifstream in(a.file);
    if (!in) throw InputError("cannot read '" + a.file + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    auto r = parse_workspace(buf.str());
    Json j{{"viewforge_report", kReportVersion}, {"command", "validate"}, {"ok", r.ok()}};
    Json diags = Json::array();
    std::string text;
    for (const auto& d : r.diagnostics) {
        diags.push_back(Json{{"line", d.line}, {"column", d.column}, {"message", d.message}, {"hint", d.hint}});
        text += a.file + ":" + d.to_string() + "\n";
    }
    j["diagnostics"] = diags;
    if (r.ok()) {
        const auto& ws = r.workspace;
        j["workspace"] = print_workspace(ws);
        for (const auto& [name, d] : ws.instances)
            for (const auto& v : validate_dschema(ws.schema, d))
                text += "instance " + name + ": " + v.message + "\n";
        std::ostringstream s;
        s << "ok: " << ws.schema.sources().size() << " sources, " << ws.schema.relations().size() << " relations, "
          << ws.queries.size() << " queries, " << ws.secrets.size() << " secrets, " << ws.rules.size() << " rules, "
          << ws.views.size() << " views, " << ws.dviews.size() << " dviews, " << ws.instances.size()
          << " instances\n";
        text += s.str();
        if (!ws.rules.empty()) {
            try {
                auto wa = is_weakly_acyclic(ws.rules);
                j["weakly_acyclic"] = wa.weakly_acyclic;
                if (!wa.weakly_acyclic) text += "warning: rules are not weakly acyclic; chases may run out of fuel\n";
            } catch (const InputError&) {
                j["weakly_acyclic"] = nullptr;
            }
        }
    }
    emit(sh, j, text);
    return r.ok() ? kDefinitive : kInputError;
}

int cmd_canonical(const Shared& sh, const Args& a) {
    auto ws = load_workspace_file(a.file);
    const auto& q = ws.query(a.query);
    Json j = report_header(ws, "canonical");
    auto sv = source_vars(q, ws.schema);
    Json per = Json::array();
    std::string text;
    for (const auto& s : sources_of(q, ws.schema)) {
        auto v = canonical_view(q, s, ws.schema);
        auto ctx = canonical_context(q, s, ws.schema);
        Json sj = Json::array();
        for (const auto& t : sv.of(s).sjvars) sj.push_back(t.name());
        per.push_back(Json{{"source", s},
                           {"sjvars", sj},
                           {"view", to_json(v)},
                           {"context", to_json(ctx.query)},
                           {"degenerate_context", ctx.degenerate}});
        text += v.to_string() + "\n";
        if (sh.trace) text += "  context: " + ctx.query.to_string() + "\n";
    }
    j["query"] = to_json(q);
    j["per_source"] = per;
    j["monadic_frontier"] = is_monadic_frontier(q, ws.schema);
    emit(sh, j, text);
    return kDefinitive;
}

int cmd_minimize(const Shared& sh, const Args& a) {
    auto ws = load_workspace_file(a.file);
    const auto& q = ws.query(a.query);
    Json j = report_header(ws, "minimize");
    j["query"] = to_json(q);
    std::string text;
    int code = kDefinitive;
    if (ws.rules.empty()) {
        auto rep = is_minimal(q);
        j["minimality"] = to_json(rep);
        auto m = minimize(q);
        j["minimized"] = to_json(m);
        text = std::string(rep.minimal ? "minimal" : "not minimal") + "\nquery " + m.to_string() + "\n";
    } else {
        auto m = minimize_under_rules(q, ws.rules, sh.chase());
        if (m) {
            j["minimized"] = to_json(*m);
            text = "query " + m->to_string() + "\n";
        } else {
            j["minimized"] = nullptr;
            text = "Unknown: minimization under the rules ran out of fuel\n";
            code = kUnknown;
        }
    }
    emit(sh, j, text);
    return code;
}

int cmd_shuffles(const Shared& sh, const Args& a) {
    auto ws = load_workspace_file(a.file);
    const auto& q = ws.query(a.query);
    ShuffleConfig cfg;
    cfg.chase = sh.chase();
    auto design = build_shuffle_views(q, ws.schema, ws.rules, cfg);
    Json j = report_header(ws, "shuffles");
    j["query"] = to_json(q);
    j["design"] = to_json(design);
    auto trivial = has_only_trivial_shuffles(q, ws.schema, ws.rules, cfg);
    j["only_trivial_shuffles"] = to_string(trivial);
    std::string text;
    for (const auto& sv : design.views) {
        text += sv.view.to_string() + "\n";
        if (sh.trace) {
            text += "  type " + sv.type.to_string() + ", shuffles:";
            for (const auto& mu : sv.shuffles) text += " " + mu.to_string(sv.type.vars);
            text += "\n";
        }
    }
    text += "only trivial shuffles: " + to_string(trivial) + "\n";
    emit(sh, j, text);
    return design.incomplete || trivial == Tri::Unknown ? kUnknown : kDefinitive;
}

int cmd_to_ra(const Shared& sh, const Args& a) {
    auto ws = load_workspace_file(a.file);
    std::vector<View> sources;
    if (!a.view.empty()) {
        sources.push_back(ws.view(a.view));
    } else if (!a.query.empty()) {
        ShuffleConfig cfg;
        cfg.chase = sh.chase();
        for (const auto& sv : build_shuffle_views(ws.query(a.query), ws.schema, ws.rules, cfg).views)
            sources.push_back(sv.view);
    } else {
        throw InputError("to-ra needs --view or --query");
    }
    Json j = report_header(ws, "to-ra");
    Json out = Json::array();
    std::string text;
    for (const auto& v : sources) {
        std::vector<View> ra;
        if (v.is_dcq()) {
            ra = compile_dcq_to_ra(v);
        } else {
            ra.push_back(v);
        }
        Json list = Json::array();
        for (const auto& r : ra) {
            list.push_back(to_json(r));
            text += r.to_string() + "\n";
        }
        out.push_back(Json{{"view", to_json(v)}, {"ra", list}});
    }
    j["compiled"] = out;
    emit(sh, j, text);
    return kDefinitive;
}

int cmd_determinacy(const Shared& sh, const Args& a) {
    auto ws = load_workspace_file(a.file);
    const auto& q = ws.query(a.query);
    const auto& dv = ws.dview(a.dview);
    DeterminacyConfig cfg{sh.max_rounds, sh.fuel};
    auto v = check_determinacy(q, dv, ws.rules, cfg);
    Json j = report_header(ws, "determinacy");
    j["query"] = q.name;
    j["dview"] = dv.name;
    j["verdict"] = to_json(v, q, dv);
    std::string text = to_string(v.outcome);
    if (v.outcome != DeterminacyOutcome::Unknown) text += " (round " + std::to_string(v.round) + ")";
    if (!v.reason.empty()) text += ": " + v.reason;
    text += "\n";
    if (sh.trace)
        for (std::size_t r = 0; r < v.rounds.size(); ++r) {
            const auto& s = v.rounds[r];
            text += "  round " + std::to_string(r + 1) + ": |F0|=" + std::to_string(s.f0.size()) +
                    " |F1|=" + std::to_string(s.f1_size) + " |F2|=" + std::to_string(s.f2.size()) +
                    " |F3|=" + std::to_string(s.f3_size) + " |F4|=" + std::to_string(s.f4_size) +
                    " |F5|=" + std::to_string(s.f5_size) + "\n";
        }
    if (v.outcome == DeterminacyOutcome::NotDetermined)
        text += "  left:  " + v.witness_left.to_string() + "\n  right: " + v.witness_right.to_string() + "\n";
    emit(sh, j, text);
    return v.outcome == DeterminacyOutcome::Unknown ? kUnknown : kDefinitive;
}

int cmd_disclosure(const Shared& sh, const Args& a) {
    auto ws = load_workspace_file(a.file);
    const auto& dv = ws.dview(a.dview);
    const auto& p = single_secret(ws, a);
    auto v = check_un_disclosure_cq(dv, p, ws.schema, ws.rules, sh.chase());
    Json j = report_header(ws, "disclosure");
    j["dview"] = dv.name;
    j["verdict"] = to_json(v, p, dv);
    std::string text = to_string(v.outcome);
    if (!v.reason.empty()) text += ": " + v.reason;
    text += "\n";
    if (v.outcome == DisclosureOutcome::NonDisclosing) text += "  witness: " + v.witness.to_string() + "\n";
    if (sh.trace) text += "  certificate: " + v.certificate.to_string() + "\n";
    emit(sh, j, text);
    return v.outcome == DisclosureOutcome::Unknown ? kUnknown : kDefinitive;
}

int cmd_design(const Shared& sh, const Args& a) {
    auto ws = load_workspace_file(a.file);
    DesignConfig cfg;
    cfg.chase = sh.chase();
    cfg.shuffle.chase = sh.chase();
    cfg.bounds = sh.bounds();
    auto rep = run_design(ws, a.query, a.secrets, parse_design_class(a.cls), cfg);
    std::string text = rep.headline + "\n";
    if (!rep.limiting_stage.empty()) text += "  limited by: " + rep.limiting_stage + "\n";
    for (const auto& n : rep.notes) text += "  " + n + "\n";
    emit(sh, rep.json, text);
    return rep.answer == Tri::Unknown ? kUnknown : kDefinitive;
}

int cmd_replication(const Shared& sh, const Args& a) {
    auto ws = load_workspace_file(a.file);
    const auto& q = ws.query(a.query);
    Json j = report_header(ws, "replication");
    std::string text;
    int code = kDefinitive;
    if (!a.secrets.empty()) {
        const auto& p = single_secret(ws, a);
        auto r = fullrep_design(q, p, ws.schema);
        j["fullrep"] = to_json(r, q, p);
        text += std::string(r.applicable ? "Applicable" : "NotApplicable") + (r.reason.empty() ? "" : ": " + r.reason) +
                "\n";
        if (r.applicable)
            text += "  projections ok: " + std::string(r.projections_ok ? "yes" : "no") +
                    ", secret fails on Str: " + (r.secret_fails ? "yes" : "no") +
                    ", query preserved: " + (r.query_preserved ? "yes" : "no") + "\n";
    }
    if (!a.left.empty()) {
        auto e = str_equivalent(ws.instance(a.left), ws.instance(a.right.empty() ? a.left : a.right), q, ws.schema,
                                a.max_iter);
        j["str_equivalence"] = to_json(e);
        text += "global: " + (e.global ? "Yes(" + std::to_string(*e.global) + ")" : std::string("No")) + "\n";
        for (const auto& [s, it] : e.per_source)
            text += "  " + s + ": " + (it ? "Yes(" + std::to_string(*it) + ")" : std::string("No")) + "\n";
    }
    if (a.secrets.empty() && a.left.empty()) throw InputError("replication needs --secret or --left");
    emit(sh, j, text);
    return code;
}

int cmd_oracle(const Shared& sh, const Args& a, const std::string& mode) {
    auto ws = load_workspace_file(a.file);
    Json j = report_header(ws, "oracle " + mode);
    j["domain_size"] = sh.domain_size;
    j["max_facts"] = sh.max_facts;
    std::string text;
    if (mode == "equiv") {
        const auto& q = ws.query(a.query);
        if (!ws.schema.has_source(a.source)) throw InputError("unknown source '" + a.source + "'");
        auto l = ws.instance(a.left).local(a.source);
        auto r = ws.instance(a.right).local(a.source);
        auto e = sq_equivalence_exact(l, r, q, a.source, ws.schema);
        j["sq_equivalence"] = to_json(e);
        text = e.equivalent ? "Yes\n" : "No: context " + e.context.to_string() + "\n";
    } else if (mode == "determinacy") {
        const auto& q = ws.query(a.query);
        const auto& dv = ws.dview(a.dview);
        auto r = refute_determinacy(q, dv, ws.schema, sh.bounds(), ws.rules);
        j["refutation"] = to_json(r, q, dv);
        text = r.found ? "Counterexample\n  left:  " + r.left.to_string() + "\n  right: " + r.right.to_string() + "\n"
                       : "NoCounterexampleUpToBound (" + std::to_string(r.examined) + " instances)\n";
    } else {
        const auto& dv = ws.dview(a.dview);
        const auto& p = single_secret(ws, a);
        auto r = check_un_disclosure_oracle(dv, p, ws.schema, sh.bounds(), ws.rules);
        j["disclosure"] = to_json(r, p, dv);
        text = r.disclosing ? "Disclosing\n  witness: " + r.witness.to_string() + "\n"
                            : "NoWitnessUpToBound (" + std::to_string(r.examined) + " instances)\n";
    }
    emit(sh, j, text);
    return kDefinitive;
}

int cmd_verify(const Shared& sh, const Args& a) {
    std::ifstream in(a.file);
    if (!in) throw InputError("cannot read '" + a.file + "'");
    Json report;
    try {
        report = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw InputError(std::string("malformed report: ") + e.what());
    }
    auto checks = verify_report(report);
    Json j{{"viewforge_report", kReportVersion}, {"command", "verify"}};
    Json list = Json::array();
    std::string text;
    bool all_ok = true;
    for (const auto& c : checks) {
        list.push_back(Json{{"kind", c.kind}, {"path", c.path}, {"ok", c.ok}, {"detail", c.detail}});
        text += std::string(c.ok ? "ok   " : "FAIL ") + c.kind + " at " + (c.path.empty() ? "/" : c.path) +
                (c.ok ? "" : ": " + c.detail) + "\n";
        all_ok = all_ok && c.ok;
    }
    j["checks"] = list;
    j["ok"] = all_ok;
    text += std::to_string(checks.size()) + " checks, " + (all_ok ? "all passed" : "some failed") + "\n";
    emit(sh, j, text);
    return all_ok ? kDefinitive : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"viewforge: view design for distributed sources"};
    app.require_subcommand(1);
    app.fallthrough();
    Shared sh;
    Args a;
    app.add_option("--fuel", sh.fuel, "chase step budget")->capture_default_str();
    app.add_option("--max-rounds", sh.max_rounds, "determinacy rounds")->capture_default_str();
    app.add_option("--domain-size", sh.domain_size, "oracle domain size")->capture_default_str();
    app.add_option("--max-facts", sh.max_facts, "oracle facts per relation")->capture_default_str();
    app.add_option("--jobs", sh.jobs, "oracle worker threads")->capture_default_str();
    app.add_flag("--json", sh.json, "print the JSON report");
    app.add_flag("--trace", sh.trace, "print intermediate steps");

    auto file_cmd = [&](const std::string& name, const std::string& help) {
        auto* c = app.add_subcommand(name, help);
        c->add_option("file", a.file, "workspace file")->required();
        return c;
    };
    auto* validate = file_cmd("validate", "parse and check a workspace");
    auto* canonical = file_cmd("canonical", "canonical views of a query");
    canonical->add_option("--query", a.query)->required();
    auto* minimize_cmd = file_cmd("minimize", "minimize a query");
    minimize_cmd->add_option("--query", a.query)->required();
    auto* shuffles = file_cmd("shuffles", "invariant shuffle views");
    shuffles->add_option("--query", a.query)->required();
    auto* to_ra = file_cmd("to-ra", "compile DCQ views to relational algebra");
    to_ra->add_option("--view", a.view);
    to_ra->add_option("--query", a.query, "compile the shuffle views of this query");
    auto* determinacy = file_cmd("determinacy", "does a d-view determine a query");
    determinacy->add_option("--query", a.query)->required();
    determinacy->add_option("--dview", a.dview)->required();
    auto* disclosure = file_cmd("disclosure", "critical-instance disclosure check");
    disclosure->add_option("--dview", a.dview)->required();
    disclosure->add_option("--secret", a.secrets)->required();
    auto* design = file_cmd("design", "search for a useful non-disclosing d-view");
    design->add_option("--query", a.query)->required();
    design->add_option("--secret", a.secrets)->required();
    design->add_option("--class", a.cls)->check(CLI::IsMember({"cq", "all", "replication"}))->capture_default_str();
    auto* replication = file_cmd("replication", "replication-based designs and Str equivalence");
    replication->add_option("--query", a.query)->required();
    replication->add_option("--secret", a.secrets);
    replication->add_option("--left", a.left);
    replication->add_option("--right", a.right);
    replication->add_option("--max-iter", a.max_iter)->capture_default_str();
    auto* oracle = app.add_subcommand("oracle", "bounded brute-force checks");
    oracle->require_subcommand(1);
    oracle->fallthrough();
    auto* o_equiv = oracle->add_subcommand("equiv", "exact (s,Q)-equivalence of two instances");
    o_equiv->add_option("file", a.file)->required();
    o_equiv->add_option("--query", a.query)->required();
    o_equiv->add_option("--source", a.source)->required();
    o_equiv->add_option("--left", a.left)->required();
    o_equiv->add_option("--right", a.right)->required();
    auto* o_det = oracle->add_subcommand("determinacy", "search for a determinacy counterexample");
    o_det->add_option("file", a.file)->required();
    o_det->add_option("--query", a.query)->required();
    o_det->add_option("--dview", a.dview)->required();
    auto* o_dis = oracle->add_subcommand("disclosure", "search for a disclosure witness");
    o_dis->add_option("file", a.file)->required();
    o_dis->add_option("--dview", a.dview)->required();
    o_dis->add_option("--secret", a.secrets)->required();
    auto* verify = app.add_subcommand("verify", "re-check the witnesses of a JSON report");
    verify->add_option("report", a.file)->required();
    for (auto* c : {validate, canonical, minimize_cmd, shuffles, to_ra, determinacy, disclosure, design, replication,
                    verify, o_equiv, o_det, o_dis})
        c->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kInputError;
    }

    try {
        if (*validate) return cmd_validate(sh, a);
        if (*canonical) return cmd_canonical(sh, a);
        if (*minimize_cmd) return cmd_minimize(sh, a);
        if (*shuffles) return cmd_shuffles(sh, a);
        if (*to_ra) return cmd_to_ra(sh, a);
        if (*determinacy) return cmd_determinacy(sh, a);
        if (*disclosure) return cmd_disclosure(sh, a);
        if (*design) return cmd_design(sh, a);
        if (*replication) return cmd_replication(sh, a);
        if (*o_equiv) return cmd_oracle(sh, a, "equiv");
        if (*o_det) return cmd_oracle(sh, a, "determinacy");
        if (*o_dis) return cmd_oracle(sh, a, "disclosure");
        if (*verify) return cmd_verify(sh, a);
    } catch (const ParseError& e) {
        for (const auto& d : e.diagnostics()) std::cerr << a.file << ":" << d.to_string() << "\n";
        return kInputError;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const EqualityClash& e) {
        std::cerr << "Unknown: " << e.what() << "\n";
        return kUnknown;
    }
    return kInputError;
}
