#include <doctest.h>

#include "../support/oracles.hpp"
#include "viewforge/report.hpp"

using namespace viewforge;
using namespace vf_test;

namespace {

std::vector<Diagnostic> diagnose(const std::string& text) { return parse_workspace(text).diagnostics; }

bool all_ok(const std::vector<VerifyCheck>& checks) {
    return !checks.empty() &&
           std::all_of(checks.begin(), checks.end(), [](const VerifyCheck& c) { return c.ok; });
}

Json wrap(const Workspace& ws, const std::string& cmd, const std::string& key, Json body) {
    Json j = report_header(ws, cmd);
    j[key] = std::move(body);
    return j;
}

}  // namespace

TEST_SUITE("cli-app") {
    TEST_CASE("fixtures parse and round-trip") {
        for (auto name : {"example1.vf", "square.vf", "es_symmetric.vf", "makesafe.vf"}) {
            CAPTURE(name);
            auto res = parse_workspace(slurp(fixture_path(name)));
            REQUIRE(res.ok());
            auto printed = print_workspace(res.workspace);
            auto again = load_workspace(printed);
            CHECK(again == res.workspace);
            CHECK(print_workspace(again) == printed);
        }
    }

    TEST_CASE("empty file") {
        auto res = parse_workspace("");
        CHECK(res.ok());
        CHECK(res.workspace == Workspace{});
        CHECK(parse_workspace("# only a comment\n\n").ok());
    }

    TEST_CASE("local and replicated declaration conflict") {
        auto d = diagnose("source a { T/2 }\nsource b { U/1 }\nreplicate T/2 across a, b\n");
        REQUIRE(d.size() == 1);
        CHECK(d[0].line == 3);
        CHECK(d[0].message.find("'T'") != std::string::npos);
        CHECK_FALSE(d[0].hint.empty());
    }

    TEST_CASE("diagnostics are collected, not fail-fast") {
        auto d = diagnose(
            "source s { R/2 }\n"
            "replicate R/2 across s, t\n"
            "query Q := R(x\n"
            "view V(x) @ s := R(x,y,z)\n"
            "query W := Missing(x)\n"
            "dview D { Nope }\n");
        REQUIRE(d.size() == 5);
        CHECK(d[0].line == 2);
        CHECK(d[1].line == 4);
        CHECK(d[1].column == 1);
        CHECK(d[2].line == 4);
        CHECK(d[3].line == 5);
        CHECK(d[4].line == 6);
        CHECK_THROWS_AS(load_workspace("query Q := R(x)\n"), ParseError);
        try {
            load_workspace("source s { R/1 }\nquery Q := R(x,y)\n");
        } catch (const ParseError& e) {
            REQUIRE(e.diagnostics().size() == 1);
            CHECK(e.diagnostics()[0].to_string().find("2:") == 0);
        }
    }

    TEST_CASE("grammar details") {
        auto ws = load_workspace(
            "source s { R/2, U/1 }\n"
            "query Q(x) := R(x, \"c\"), U(x)\n"
            "rule r := R(x,y) -> exists z . R(y,z)\n"
            "rule fd := R(x,y), R(x,z) -> y = z\n"
            "view V(x,y) @ s := R(x,y) | U(x) where x != y\n"
            "instance I { R(a, \"b c\"). U(a). }\n");
        const auto& q = ws.query("Q");
        CHECK(q.free_vars == std::vector<Term>{X("x")});
        CHECK(q.atoms[0].args[1] == C("c"));
        REQUIRE(ws.rules.size() == 2);
        CHECK(ws.rules[0].existential_vars() == std::vector<Term>{X("z")});
        CHECK_FALSE(ws.rules[1].is_tgd());
        CHECK(ws.view("V").is_dcq());
        CHECK(ws.view("V").dcq().guard.size() == 1);
        CHECK(ws.instance("I").local("s").contains(Atom{"R", {C("a"), C("b c")}}));
        CHECK(load_workspace(print_workspace(ws)) == ws);
        CHECK(parse_atoms("R(x,y), U(y)", ws.schema).size() == 2);
        CHECK_THROWS_AS(parse_atoms("R(x)", ws.schema), InputError);
        CHECK_FALSE(parse_workspace("source s { R/2 }\nrule r := R(x,y) -> exists y . R(y,x)\n").ok());
    }

    TEST_CASE("example1 design in every class") {
        auto ws = fixture("example1.vf");
        auto all = run_design(ws, "Q", {"P_join"}, DesignClass::All);
        CHECK(all.answer == Tri::No);
        CHECK(all.headline == "No useful and non-disclosing d-view exists (in any class)");
        auto closure = run_design(ws, "Qb", {"P_closure"}, DesignClass::All);
        CHECK(closure.answer == Tri::No);
        auto cq = run_design(ws, "Qb", {"P_closure"}, DesignClass::CQ);
        CHECK(cq.answer == Tri::No);
        CHECK(cq.headline == design_headline(Tri::No));
        auto rep = run_design(ws, "Qb", {"P_closure"}, DesignClass::Replication);
        CHECK(rep.answer == Tri::No);
        CHECK(all_ok(verify_report(all.json)));
    }

    TEST_CASE("square designs") {
        auto ws = fixture("square.vf");
        auto rep = run_design(ws, "Q", {"p1"}, DesignClass::Replication);
        CHECK(rep.answer == Tri::Yes);
        CHECK(rep.headline == "A useful and non-disclosing d-view exists");
        CHECK(all_ok(verify_report(rep.json)));
        auto cq = run_design(ws, "Q", {"p1", "p2", "p3"}, DesignClass::CQ);
        CHECK(cq.answer == Tri::Unknown);
        CHECK_FALSE(cq.limiting_stage.empty());
        CHECK(cq.json.dump(2) + "\n" == slurp(std::string(VIEWFORGE_GOLDEN) + "/square_design_cq.json"));
    }

    TEST_CASE("design class names") {
        CHECK(parse_design_class("cq") == DesignClass::CQ);
        CHECK(parse_design_class("all") == DesignClass::All);
        CHECK(parse_design_class("replication") == DesignClass::Replication);
        CHECK_THROWS_AS(parse_design_class("best"), InputError);
        CHECK(to_string(DesignClass::All) == "all");
    }

    TEST_CASE("verify accepts genuine witnesses and rejects tampered ones") {
        auto ws = fixture("square.vf");
        const auto& dv = ws.dview("design1");
        const auto& p1 = ws.secret("p1");
        auto v = check_un_disclosure_cq(dv, p1, ws.schema);
        REQUIRE(v.outcome == DisclosureOutcome::NonDisclosing);
        auto j = wrap(ws, "disclosure", "verdict", to_json(v, p1, dv));
        CHECK(all_ok(verify_report(j)));

        auto bad = j;
        bad["verdict"]["check"]["witness"].push_back(Json::array({"S", Json::array({"*", "*"})}));
        CHECK_FALSE(all_ok(verify_report(bad)));
        auto dropped = j;
        dropped["verdict"]["check"]["witness"] = Json::array();
        CHECK_FALSE(all_ok(verify_report(dropped)));

        const auto& p3 = ws.secret("p3");
        auto d = check_un_disclosure_cq(dv, p3, ws.schema);
        REQUIRE(d.outcome == DisclosureOutcome::Disclosing);
        auto dj = wrap(ws, "disclosure", "verdict", to_json(d, p3, dv));
        CHECK(all_ok(verify_report(dj)));
        auto cut = dj;
        cut["verdict"]["check"]["certificate"] = Json::array();
        CHECK_FALSE(all_ok(verify_report(cut)));

        auto ex = fixture("example1.vf");
        auto det = check_determinacy(ex.query("Q"), ex.dview("canonical"));
        auto detj = wrap(ex, "determinacy", "verdict", to_json(det, ex.query("Q"), ex.dview("canonical")));
        CHECK(all_ok(verify_report(detj)));
        auto nd = check_determinacy(ex.query("Q"), ex.dview("nopid"));
        auto ndj = wrap(ex, "determinacy", "verdict", to_json(nd, ex.query("Q"), ex.dview("nopid")));
        CHECK(all_ok(verify_report(ndj)));
        auto same = ndj;
        same["verdict"]["check"]["right"] = same["verdict"]["check"]["left"];
        CHECK_FALSE(all_ok(verify_report(same)));

        OracleBounds b;
        auto ref = refute_determinacy(ex.query("Q"), ex.dview("nopid"), ex.schema, b);
        REQUIRE(ref.found);
        auto refj = wrap(ex, "oracle", "refutation", to_json(ref, ex.query("Q"), ex.dview("nopid")));
        CHECK(all_ok(verify_report(refj)));

        auto fr = fullrep_design(ws.query("Q"), p1, ws.schema);
        auto frj = wrap(ws, "replication", "fullrep", to_json(fr, ws.query("Q"), p1));
        CHECK(all_ok(verify_report(frj)));
    }

    TEST_CASE("JSON conversions") {
        auto ws = fixture("square.vf");
        const auto& d = ws.instance("sample");
        CHECK(dinstance_from_json(to_json(d)) == d);
        Instance pairs({Atom{"T", {Term::pair(C("a"), Term::pair(C("c_x"), C("c_y"))), C("b")}}});
        CHECK(json_to_instance(instance_to_json(pairs)) == pairs);
        CHECK(term_to_json(Term::pair(C("a"), C("b"))) == Json::array({"a", "b"}));
        Term n = Term::null(4, "n_1_y");
        CHECK(json_to_term(term_to_json(n)) == n);
        CHECK_THROWS(verify_report(Json{{"command", "x"}}));
    }
}
