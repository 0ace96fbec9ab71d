#include "viewforge/report.hpp"

#include <algorithm>

#include "viewforge/canonical_views.hpp"
#include "viewforge/homomorphism.hpp"
#include "viewforge/ra.hpp"

namespace viewforge {

Json to_json(const ConjunctiveQuery& q) {
    Json free = Json::array();
    for (const auto& v : q.free_vars) free.push_back(v.name());
    Json atoms = Json::array();
    for (const auto& a : q.atoms) atoms.push_back(atom_to_json(a));
    return Json{{"name", q.name}, {"free", free}, {"atoms", atoms}, {"text", q.to_string()}};
}

Json to_json(const View& v) {
    const char* kind = v.is_cq() ? "cq" : v.is_dcq() ? "dcq" : "ra";
    return Json{{"name", v.name}, {"source", v.source}, {"kind", kind}, {"text", v.to_string()}};
}

Json to_json(const DView& dv) {
    Json views = Json::array();
    for (const auto& v : dv.views) views.push_back(to_json(v));
    return Json{{"name", dv.name}, {"views", views}};
}

Json to_json(const DInstance& d) {
    Json out = Json::object();
    for (const auto& [s, i] : d.locals()) out[s] = instance_to_json(i);
    return out;
}

DInstance dinstance_from_json(const Json& j) {
    DInstance d;
    for (const auto& [s, facts] : j.items())
        for (const auto& f : json_to_instance(facts).facts()) d.add(s, f);
    return d;
}

Json to_json(const MinimalityReport& r) {
    Json out{{"minimal", r.minimal}};
    if (r.folding) out["folding"] = assignment_to_json(*r.folding);
    if (r.subquery) out["subquery"] = to_json(*r.subquery);
    return out;
}

namespace {

Json view_texts(const DView& dv) {
    Json out = Json::array();
    for (const auto& v : dv.views) out.push_back(v.to_string());
    return out;
}

std::string query_line(const ConjunctiveQuery& q) { return "query " + q.to_string(); }

}  // namespace

Json to_json(const DeterminacyVerdict& v, const ConjunctiveQuery& q, const DView& dv) {
    Json out{{"outcome", to_string(v.outcome)}, {"round", v.round}};
    if (!v.reason.empty()) out["reason"] = v.reason;
    Json rounds = Json::array();
    for (const auto& r : v.rounds)
        rounds.push_back(Json{{"f0", r.f0.size()}, {"f1", r.f1_size}, {"f2", r.f2.size()}, {"f3", r.f3_size},
                              {"f4", r.f4_size}, {"f5", r.f5_size}});
    out["rounds"] = rounds;
    if (v.outcome == DeterminacyOutcome::Determined && !v.rounds.empty()) {
        out["check"] = Json{{"kind", "determinacy-match"},
                            {"query", query_line(q)},
                            {"views", view_texts(dv)},
                            {"f2", instance_to_json(v.rounds.back().f2)},
                            {"match", assignment_to_json(v.match)}};
    } else if (v.outcome == DeterminacyOutcome::NotDetermined) {
        out["check"] = Json{{"kind", "determinacy-witness"},
                            {"query", query_line(q)},
                            {"views", view_texts(dv)},
                            {"left", instance_to_json(v.witness_left)},
                            {"right", instance_to_json(v.witness_right)}};
    }
    return out;
}

Json to_json(const DisclosureVerdict& v, const ConjunctiveQuery& p, const DView& dv) {
    Json out{{"outcome", to_string(v.outcome)}, {"secret", p.to_string()}};
    if (!v.reason.empty()) out["reason"] = v.reason;
    if (v.outcome == DisclosureOutcome::Disclosing) {
        out["check"] = Json{{"kind", "disclosure"},
                            {"secret", query_line(p)},
                            {"views", view_texts(dv)},
                            {"certificate", instance_to_json(v.certificate)},
                            {"match", assignment_to_json(v.secret_match)}};
    } else if (v.outcome == DisclosureOutcome::NonDisclosing) {
        out["check"] = Json{{"kind", "nondisclosure"},
                            {"secret", query_line(p)},
                            {"views", view_texts(dv)},
                            {"witness", instance_to_json(v.witness)}};
    }
    return out;
}

Json to_json(const UsefulNonDisclosing& u, const ConjunctiveQuery& p) {
    Json out{{"answer", to_string(u.answer)}, {"reason", u.reason}, {"minimized", to_json(u.minimized)}};
    if (!u.design.views.empty()) out["design"] = to_json(u.design);
    out["direct"] = to_string(u.direct);
    if (!u.design.views.empty()) out["direct_verdict"] = to_json(u.direct_verdict, p, u.design);
    Json parts = Json::array();
    for (const auto& sv : u.per_source)
        parts.push_back(Json{{"source", sv.source},
                             {"secret_part", to_json(sv.secret_part)},
                             {"verdict", to_json(sv.verdict, sv.secret_part, u.design)}});
    out["per_source"] = parts;
    out["decomposition_consistent"] = u.decomposition_consistent;
    return out;
}

Json to_json(const ShuffleDesign& d) {
    Json views = Json::array();
    for (const auto& sv : d.views) {
        Json shuffles = Json::array();
        for (const auto& mu : sv.shuffles) shuffles.push_back(mu.to_string(sv.type.vars));
        Json ra = Json::array();
        if (sv.view.is_dcq())
            for (const auto& r : compile_dcq_to_ra(sv.view)) ra.push_back(to_json(r));
        views.push_back(Json{{"source", sv.source},
                             {"type", sv.type.to_string()},
                             {"shuffles", shuffles},
                             {"view", to_json(sv.view)},
                             {"ra", ra},
                             {"incomplete", sv.incomplete}});
    }
    return Json{{"views", views}, {"incomplete", d.incomplete}};
}

Json to_json(const FullRepReport& r, const ConjunctiveQuery& q, const ConjunctiveQuery& p) {
    Json out{{"applicable", r.applicable}, {"reason", r.reason}};
    if (!r.applicable) return out;
    out["replicated_relation"] = r.replicated_relation;
    out["projections_ok"] = r.projections_ok;
    out["secret_fails"] = r.secret_fails;
    out["query_preserved"] = r.query_preserved;
    out["height_before"] = r.height_before ? Json(*r.height_before) : Json(nullptr);
    out["height_after"] = r.height_after ? Json(*r.height_after) : Json(nullptr);
    out["ecr"] = "per source: two local instances are equivalent when one is an Str-iterate of the other; "
                 "when the replicated relation is nonempty the same iterate must be used on every source";
    out["check"] = Json{{"kind", "fullrep"},
                        {"query", query_line(q)},
                        {"secret", query_line(p)},
                        {"sample", to_json(r.sample)},
                        {"str1", to_json(r.str1)},
                        {"str2", to_json(r.str2)}};
    return out;
}

Json to_json(const StrEquivalence& e) {
    Json per = Json::object();
    for (const auto& [s, it] : e.per_source) per[s] = it ? Json(*it) : Json(nullptr);
    Json out{{"per_source", per}, {"per_source_all", e.per_source_all}};
    out["global"] = e.global ? Json(*e.global) : Json(nullptr);
    out["coincidence"] = e.coincidence ? Json(*e.coincidence) : Json(nullptr);
    return out;
}

Json to_json(const SqEquivalence& e) {
    Json out{{"equivalent", e.equivalent}};
    if (!e.equivalent) {
        Json m = Json::array();
        for (const auto& t : e.match) m.push_back(term_to_json(t));
        out["side"] = e.left_side ? "left" : "right";
        out["match"] = m;
        out["context"] = instance_to_json(e.context);
    }
    return out;
}

Json to_json(const DeterminacyRefutation& r, const ConjunctiveQuery& q, const DView& dv) {
    Json out{{"found", r.found}, {"examined", r.examined}};
    if (r.found)
        out["check"] = Json{{"kind", "oracle-refutation"},
                            {"query", query_line(q)},
                            {"views", view_texts(dv)},
                            {"left", instance_to_json(r.left)},
                            {"right", instance_to_json(r.right)}};
    return out;
}

Json to_json(const OracleDisclosure& r, const ConjunctiveQuery& p, const DView& dv) {
    Json out{{"disclosing", r.disclosing}, {"examined", r.examined}};
    if (r.disclosing) {
        Json ans = Json::array();
        for (const auto& t : r.answer) ans.push_back(term_to_json(t));
        out["check"] = Json{{"kind", "oracle-disclosure"},
                            {"secret", query_line(p)},
                            {"views", view_texts(dv)},
                            {"witness", instance_to_json(r.witness)},
                            {"answer", ans}};
    }
    return out;
}

Json report_header(const Workspace& ws, const std::string& command) {
    return Json{{"viewforge_report", kReportVersion}, {"command", command}, {"workspace", print_workspace(ws)}};
}

DesignClass parse_design_class(const std::string& text) {
    if (text == "cq") return DesignClass::CQ;
    if (text == "all") return DesignClass::All;
    if (text == "replication") return DesignClass::Replication;
    throw InputError("unknown design class '" + text + "' (expected cq, all or replication)");
}

std::string to_string(DesignClass c) {
    switch (c) {
    case DesignClass::CQ: return "cq";
    case DesignClass::All: return "all";
    case DesignClass::Replication: return "replication";
    }
    return "?";
}

std::string design_headline(Tri answer) {
    switch (answer) {
    case Tri::Yes: return "A useful and non-disclosing d-view exists";
    case Tri::No: return "No useful and non-disclosing d-view exists";
    case Tri::Unknown: return "Unknown";
    }
    return "?";
}

namespace {

bool uses_replication(const ConjunctiveQuery& q, const DSchema& schema) {
    return std::any_of(q.atoms.begin(), q.atoms.end(),
                       [&](const Atom& a) { return schema.at(a.relation).replicated(); });
}

ConjunctiveQuery boolean_closure(const ConjunctiveQuery& q) {
    ConjunctiveQuery b = q;
    b.free_vars.clear();
    b.name = q.name + "_closure";
    return b;
}

struct CqStage {
    Tri answer = Tri::Unknown;
    std::string reason;
    std::optional<ConjunctiveQuery> minimized;
    DView design;
    Json json;
};

Tri combine(const std::vector<Tri>& per_secret) {
    if (std::any_of(per_secret.begin(), per_secret.end(), [](Tri t) { return t == Tri::No; })) return Tri::No;
    if (std::all_of(per_secret.begin(), per_secret.end(), [](Tri t) { return t == Tri::Yes; })) return Tri::Yes;
    return Tri::Unknown;
}

CqStage cq_stage(const Workspace& ws, const ConjunctiveQuery& q, const std::vector<ConjunctiveQuery>& secrets,
                 const DesignConfig& cfg) {
    CqStage out;
    const auto& schema = ws.schema;
    Json per = Json::array();
    std::vector<Tri> answers;
    if (q.is_boolean()) {
        for (const auto& p : secrets) {
            auto u = exists_useful_nondisclosing_cq(q, p, schema, ws.rules, cfg.chase);
            answers.push_back(u.answer);
            if (!u.design.views.empty()) {
                out.design = u.design;
                out.minimized = u.minimized;
            }
            Json j = to_json(u, p);
            j["secret"] = p.name;
            per.push_back(j);
            if (out.reason.empty() && u.answer != Tri::Yes) out.reason = p.name + ": " + u.reason;
        }
        out.answer = combine(answers);
        if (!out.minimized) out.minimized = minimize_under_rules(q, ws.rules, cfg.chase);
        if (out.design.views.empty() && out.minimized) out.design = canonical_dview(*out.minimized, schema);
        if (out.answer == Tri::Yes) out.reason = "the canonical d-view of the minimized query discloses no secret";
    } else {
        auto qb = boolean_closure(q);
        Json closure = Json::array();
        for (const auto& p : secrets) {
            auto u = exists_useful_nondisclosing_cq(qb, p, schema, ws.rules, cfg.chase);
            Json j = to_json(u, p);
            j["secret"] = p.name;
            closure.push_back(j);
            answers.push_back(u.answer);
        }
        out.json["closure"] = Json{{"query", to_json(qb)}, {"per_secret", closure}};
        if (combine(answers) == Tri::No) {
            out.answer = Tri::No;
            out.reason = "already the Boolean closure of the query admits no non-disclosing useful CQ d-view";
        }
        out.minimized = minimize_under_rules(q, ws.rules, cfg.chase);
        if (!out.minimized) {
            if (out.answer != Tri::No) out.reason = "minimization under the rules ran out of fuel";
        } else {
            out.design = canonical_dview(*out.minimized, schema);
            answers.clear();
            for (const auto& p : secrets) {
                auto v = check_un_disclosure_cq(out.design, p, schema, ws.rules, cfg.chase);
                answers.push_back(v.outcome == DisclosureOutcome::NonDisclosing ? Tri::Yes : Tri::Unknown);
                Json j = to_json(v, p, out.design);
                j["secret"] = p.name;
                per.push_back(j);
            }
            if (out.answer != Tri::No) {
                out.answer = combine(answers);
                out.reason = out.answer == Tri::Yes
                                 ? "the canonical d-view of the minimized query discloses no secret"
                                 : "the canonical d-view discloses a secret but its Boolean closure does not";
                bool monadic = is_monadic_frontier(*out.minimized, schema) &&
                               !uses_replication(*out.minimized, schema) && ws.rules.empty();
                if (out.answer == Tri::Unknown && monadic) {
                    out.answer = Tri::No;
                    out.reason = "monadic frontier: every useful d-view determines the canonical views, which "
                                 "disclose a secret";
                }
            }
        }
    }
    if (out.minimized) out.json["minimized"] = to_json(*out.minimized);
    if (!out.design.views.empty()) out.json["design"] = to_json(out.design);
    out.json["per_secret"] = per;
    out.json["answer"] = to_string(out.answer);
    out.json["reason"] = out.reason;
    return out;
}

void all_stage(const Workspace& ws, const ConjunctiveQuery& q, const std::vector<ConjunctiveQuery>& secrets,
               const DesignConfig& cfg, const CqStage& cq, DesignReport& rep) {
    Json j;
    const auto& schema = ws.schema;
    if (cq.answer == Tri::Yes) {
        rep.answer = Tri::Yes;
        rep.notes.push_back("a CQ design already works, so the class of all views does too");
        j["route"] = "cq-design";
        rep.json["all"] = j;
        return;
    }
    if (!cq.minimized) {
        rep.limiting_stage = "minimization";
        rep.notes.push_back(cq.reason);
        rep.json["all"] = j;
        return;
    }
    const auto& m = *cq.minimized;
    bool monadic = is_monadic_frontier(m, schema) && !uses_replication(m, schema) && ws.rules.empty();
    j["monadic_frontier"] = monadic;
    if (monadic) {
        rep.answer = cq.answer;
        j["route"] = "monadic-frontier";
        rep.notes.push_back("monadic frontier: every useful d-view determines the canonical views, so the CQ answer "
                            "holds in any class");
        if (cq.answer == Tri::Unknown) rep.limiting_stage = "cq-disclosure";
        rep.json["all"] = j;
        return;
    }
    if (!q.is_boolean()) {
        rep.limiting_stage = "shuffle-views";
        rep.notes.push_back("shuffle views need a Boolean query without a monadic frontier");
        rep.json["all"] = j;
        return;
    }
    try {
        check_shuffle_query(m, schema);
        auto design = build_shuffle_views(m, schema, ws.rules, cfg.shuffle);
        j["shuffle_design"] = to_json(design);
        auto trivial = has_only_trivial_shuffles(m, schema, ws.rules, cfg.shuffle);
        j["only_trivial_shuffles"] = to_string(trivial);
        if (trivial == Tri::Yes && cq.answer == Tri::No) {
            rep.answer = Tri::No;
            j["route"] = "trivial-shuffles";
            rep.notes.push_back("only identity shuffles are invariant, so the shuffle views carry exactly the "
                                "information of the canonical views");
            rep.json["all"] = j;
            return;
        }
        j["route"] = "shuffle-views";
        if (cfg.oracle_evidence) {
            auto dv = design.dview();
            Json ev = Json::array();
            for (const auto& p : secrets) {
                auto r = check_un_disclosure_oracle(dv, p, schema, cfg.bounds, ws.rules);
                Json e = to_json(r, p, dv);
                e["secret"] = p.name;
                e["domain_size"] = cfg.bounds.domain_size;
                e["max_facts"] = cfg.bounds.max_facts;
                ev.push_back(e);
                if (r.disclosing)
                    rep.notes.push_back("bounded oracle: the shuffle views disclose " + p.name +
                                        " on instances within the bound");
            }
            j["oracle_evidence"] = ev;
        }
        rep.limiting_stage = "disclosure of the shuffle views is only checked up to the oracle bound";
    } catch (const InputError& e) {
        rep.limiting_stage = "shuffle-views";
        rep.notes.push_back(e.what());
    }
    rep.json["all"] = j;
}

void replication_stage(const Workspace& ws, const ConjunctiveQuery& q, const std::vector<ConjunctiveQuery>& secrets,
                       DesignReport& rep) {
    Json per = Json::array();
    std::vector<Tri> answers;
    for (const auto& p : secrets) {
        Tri t = Tri::Unknown;
        FullRepReport r;
        if (find_cq_homomorphism(p, q)) {
            t = Tri::No;
            r.reason = "the secret maps homomorphically into the query";
        } else {
            r = fullrep_design(q, p, ws.schema);
            if (r.applicable) t = Tri::Yes;
        }
        Json j = to_json(r, q, p);
        j["secret"] = p.name;
        j["answer"] = to_string(t);
        per.push_back(j);
        answers.push_back(t);
    }
    rep.answer = combine(answers);
    if (rep.answer == Tri::Unknown) rep.limiting_stage = "replication construction not applicable";
    rep.json["replication"] = Json{{"per_secret", per}};
}

}  // namespace

DesignReport run_design(const Workspace& ws, const std::string& query, const std::vector<std::string>& secret_names,
                        DesignClass cls, const DesignConfig& cfg) {
    DesignReport rep;
    const auto& q = ws.query(query);
    std::vector<ConjunctiveQuery> secrets;
    for (const auto& s : secret_names) secrets.push_back(ws.secret(s));
    if (secrets.empty()) throw InputError("design needs at least one secret");
    if (cls == DesignClass::Replication && !q.is_boolean()) throw InputError("class replication needs a Boolean query");
    if (cls == DesignClass::Replication)
        for (const auto& p : secrets)
            if (!p.is_boolean()) throw InputError("class replication needs Boolean secrets");

    rep.json = report_header(ws, "design");
    rep.json["class"] = to_string(cls);
    rep.json["query"] = q.name;
    Json names = Json::array();
    for (const auto& s : secret_names) names.push_back(s);
    rep.json["secrets"] = names;

    if (cls == DesignClass::Replication) {
        replication_stage(ws, q, secrets, rep);
    } else {
        auto cq = cq_stage(ws, q, secrets, cfg);
        rep.json["cq"] = cq.json;
        rep.answer = cq.answer;
        if (cq.answer == Tri::Unknown) rep.limiting_stage = "cq-disclosure";
        if (!cq.reason.empty()) rep.notes.push_back(cq.reason);
        if (cq.minimized && uses_replication(*cq.minimized, ws.schema) && secrets.size() > 1)
            rep.notes.push_back("with replicated relations no single minimally informative design serves every "
                                "secret; verdicts are per secret");
        if (cls == DesignClass::All) {
            rep.answer = Tri::Unknown;
            rep.limiting_stage.clear();
            all_stage(ws, q, secrets, cfg, cq, rep);
        }
    }
    rep.headline = design_headline(rep.answer);
    if (rep.answer == Tri::No && cls == DesignClass::All) rep.headline += " (in any class)";
    rep.json["answer"] = to_string(rep.answer);
    rep.json["headline"] = rep.headline;
    if (!rep.limiting_stage.empty()) rep.json["limiting_stage"] = rep.limiting_stage;
    rep.json["notes"] = rep.notes;
    return rep;
}

namespace {

Workspace schema_only(const Workspace& ws) {
    Workspace out;
    out.schema = ws.schema;
    return out;
}

Workspace with_lines(const Workspace& base, const Json& lines) {
    std::string text = print_workspace(schema_only(base));
    if (lines.is_array()) {
        for (const auto& l : lines) text += l.get<std::string>() + "\n";
    } else {
        text += lines.get<std::string>() + "\n";
    }
    return load_workspace(text);
}

DView views_of(const Workspace& base, const Json& lines) {
    DView dv;
    dv.name = "checked";
    dv.views = with_lines(base, lines).views;
    return dv;
}

ConjunctiveQuery query_of(const Workspace& base, const Json& line) { return with_lines(base, line).queries.at(0); }

std::string check_one(const Workspace& ws, const Json& c) {
    const std::string kind = c.at("kind").get<std::string>();
    if (kind == "nondisclosure") {
        auto dv = views_of(ws, c.at("views"));
        auto p = query_of(ws, c.at("secret"));
        return validate_nondisclosure_witness(dv, p, ws.schema, json_to_instance(c.at("witness")), ws.rules);
    }
    if (kind == "disclosure") {
        auto p = query_of(ws, c.at("secret"));
        auto cert = json_to_instance(c.at("certificate"));
        auto h = json_to_assignment(c.at("match"));
        for (const auto& v : p.free_vars) {
            auto it = h.find(v);
            if (it == h.end() || !(it->second == critical_element()))
                return "free variable " + v.name() + " is not sent to the critical element";
        }
        if (!is_homomorphism(p.atoms, cert, h)) return "match is not a homomorphism into the certificate";
        auto dv = views_of(ws, c.at("views"));
        Instance crit = critical_facts(ws.schema);
        auto dom = active_domain(cert);
        dom.insert(critical_element());
        dom = padded_domain(dom, max_arity(dv));
        if (view_images(dv, crit, &dom) != view_images(dv, cert, &dom))
            return "certificate view image differs from the critical one";
        return {};
    }
    if (kind == "determinacy-witness") {
        auto dv = views_of(ws, c.at("views"));
        auto q = query_of(ws, c.at("query"));
        return validate_determinacy_witness(q, dv, json_to_instance(c.at("left")), json_to_instance(c.at("right")),
                                            ws.rules);
    }
    if (kind == "determinacy-match") {
        auto dv = views_of(ws, c.at("views"));
        auto q = query_of(ws, c.at("query"));
        auto f2 = json_to_instance(c.at("f2"));
        auto h = json_to_assignment(c.at("match"));
        for (const auto& v : q.free_vars) {
            auto it = h.find(v);
            if (it == h.end() || !(it->second == frozen(v))) return "free variable " + v.name() + " is not fixed";
        }
        std::vector<Atom> primed_atoms;
        for (auto a : q.atoms) {
            a.relation = primed(a.relation);
            primed_atoms.push_back(std::move(a));
        }
        if (!is_homomorphism(primed_atoms, f2, h)) return "match is not a homomorphism into the primed copy";
        return {};
    }
    if (kind == "oracle-refutation") {
        auto dv = views_of(ws, c.at("views"));
        auto q = query_of(ws, c.at("query"));
        auto l = json_to_instance(c.at("left"));
        auto r = json_to_instance(c.at("right"));
        if (!ws.rules.empty() && (!satisfies(l, ws.rules) || !satisfies(r, ws.rules))) return "rules violated";
        if (!views_agree(dv, l, r)) return "view images differ";
        if (enumerate_matches(q, l) == enumerate_matches(q, r)) return "query answers agree";
        return {};
    }
    if (kind == "oracle-disclosure") {
        auto p = query_of(ws, c.at("secret"));
        auto w = json_to_instance(c.at("witness"));
        Tuple ans;
        for (const auto& t : c.at("answer")) ans.push_back(json_to_term(t));
        if (!enumerate_matches(p, w).count(ans)) return "secret answer does not hold on the witness";
        return {};
    }
    if (kind == "fullrep") {
        auto q = query_of(ws, c.at("query"));
        auto p = query_of(ws, c.at("secret"));
        auto sample = dinstance_from_json(c.at("sample"));
        auto str1 = dinstance_from_json(c.at("str1"));
        if (!validate_dschema(ws.schema, str1).empty()) return "Str output violates the schema";
        Instance g = str1.global();
        if (find_homomorphism(p.atoms, g)) return "secret holds on the Str output";
        if (holds(q, g) != holds(q, sample.global())) return "Str output changes the query answer";
        Instance frozen_q = build_canondb(q);
        if (!is_homomorphism(g.facts(), sample.global(), projection(g, true))) return "first projection fails";
        if (!is_homomorphism(g.facts(), frozen_q, projection(g, false))) return "second projection fails";
        return {};
    }
    return "unknown check kind '" + kind + "'";
}

void walk(const Workspace& ws, const Json& j, const std::string& path, std::vector<VerifyCheck>& out) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) {
            if (k == "check" && v.is_object()) {
                VerifyCheck c;
                c.kind = v.value("kind", std::string{});
                c.path = path;
                try {
                    c.detail = check_one(ws, v);
                } catch (const std::exception& e) {
                    c.detail = std::string("malformed check: ") + e.what();
                }
                c.ok = c.detail.empty();
                out.push_back(std::move(c));
            } else {
                walk(ws, v, path + "/" + k, out);
            }
        }
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) walk(ws, j[i], path + "/" + std::to_string(i), out);
    }
}

}  // namespace

std::vector<VerifyCheck> verify_report(const Json& report) {
    if (!report.is_object() || report.value("viewforge_report", 0) != kReportVersion)
        throw InputError("not a viewforge report (missing \"viewforge_report\": 1)");
    auto ws = load_workspace(report.at("workspace").get<std::string>());
    std::vector<VerifyCheck> out;
    walk(ws, report, "", out);
    return out;
}

}  // namespace viewforge
