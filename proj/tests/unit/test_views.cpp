#include <doctest.h>

#include "../support/oracles.hpp"
#include "viewforge/canonical_views.hpp"
#include "viewforge/determinacy.hpp"
#include "viewforge/minimization.hpp"
#include "viewforge/oracle.hpp"

using namespace viewforge;
using namespace vf_test;

namespace {

std::vector<Term> vars(std::initializer_list<const char*> names) {
    std::vector<Term> out;
    for (auto n : names) out.push_back(X(n));
    return out;
}

// Q holds iff the natural join of the canonical view images is nonempty.
bool join_of_views_nonempty(const DView& dv, const Instance& i) {
    Instance images;
    ConjunctiveQuery join{"J", {}, {}};
    for (const auto& v : dv.views) {
        std::string rel = "J_" + v.name;
        for (const auto& t : eval_view(v, i)) images.add(rel, t);
        join.atoms.push_back(Atom{rel, v.head()});
    }
    return !brute_matches(join, images).empty();
}

}  // namespace

TEST_SUITE("canonical-views") {
    TEST_CASE("source variables of example1") {
        auto ws = fixture("example1.vf");
        auto rep = source_vars(ws.query("Q"), ws.schema);
        CHECK(rep.of("hospital").svars == vars({"pid", "tinfo", "tdate"}));
        CHECK(rep.of("hospital").sjvars == vars({"pid"}));
        CHECK(rep.of("registry").sjvars == vars({"pid"}));
    }

    TEST_CASE("replicated atoms count for every member source") {
        auto ws = fixture("square.vf");
        auto rep = source_vars(ws.query("Q"), ws.schema);
        CHECK(rep.of("s").sjvars == vars({"x", "y", "z", "w"}));
        CHECK(rep.of("p").sjvars == vars({"x", "y", "z", "w"}));
        CHECK_FALSE(is_monadic_frontier(ws.query("Q"), ws.schema));
        auto ctx = canonical_context(ws.query("Q"), "s", ws.schema);
        CHECK(ctx.query.atoms == std::vector<Atom>{Atom{"P", {X("w"), X("x")}}});
        auto dv = canonical_dview(ws.query("Q"), ws.schema);
        REQUIRE(dv.views.size() == 2);
        CHECK(dv.views[0].cq().atoms.size() == 3);
        CHECK(dv.views[1].cq().atoms.size() == 3);
    }

    TEST_CASE("canonical views of example1") {
        auto ws = fixture("example1.vf");
        const auto& q = ws.query("Q");
        auto h = canonical_view(q, "hospital", ws.schema);
        CHECK(h.name == "V_hospital");
        CHECK(h.cq().free_vars == vars({"pid", "tinfo"}));
        CHECK(h.cq().atoms == ws.view("H").cq().atoms);
        auto r = canonical_view(q, "registry", ws.schema);
        CHECK(r.cq().free_vars == vars({"pid", "age"}));
        CHECK(r.cq().atoms == ws.view("R").cq().atoms);
        auto ctx = canonical_context(q, "hospital", ws.schema);
        CHECK(ctx.frontier == vars({"pid"}));
        CHECK(ctx.query.atoms == ws.view("R").cq().atoms);
        CHECK_FALSE(ctx.degenerate);
        CHECK(is_monadic_frontier(q, ws.schema));
    }

    TEST_CASE("single-source queries") {
        auto ws = fixture("example1.vf");
        const auto& p = ws.secret("P_closure");
        CHECK(source_vars(p, ws.schema).of("hospital").sjvars.empty());
        auto v = canonical_view(p, "hospital", ws.schema);
        CHECK(v.cq().free_vars.empty());
        CHECK(v.cq().atoms == p.atoms);
        CHECK_THROWS_AS(canonical_view(p, "registry", ws.schema), EmptySourceBody);
        CHECK(canonical_context(p, "hospital", ws.schema).degenerate);
        CHECK(canonical_dview(p, ws.schema).views.size() == 1);
        CHECK(is_monadic_frontier(p, ws.schema));
    }

    TEST_CASE("rewriting completeness on small instances") {
        std::mt19937 rng(5);
        auto ex = fixture("example1.vf");
        auto sq = fixture("square.vf");
        struct Case {
            const Workspace* ws;
            const char* q;
        };
        for (Case c : {Case{&ex, "Qb"}, Case{&sq, "Q"}}) {
            const auto& q = c.ws->query(c.q);
            auto dv = canonical_dview(q, c.ws->schema);
            for (int k = 0; k < 150; ++k) {
                auto i = random_instance(rng, c.ws->schema.relations(), 2 + k % 3, 3);
                CHECK(!brute_matches(q, i).empty() == join_of_views_nonempty(dv, i));
            }
        }
    }

    TEST_CASE("view bodies cover the query atoms") {
        auto ws = fixture("square.vf");
        const auto& q = ws.query("Q");
        std::set<Atom> covered;
        for (const auto& v : canonical_dview(q, ws.schema).views)
            for (const auto& a : v.cq().atoms) covered.insert(a);
        CHECK(covered == std::set<Atom>(q.atoms.begin(), q.atoms.end()));
    }
}

TEST_SUITE("minimization") {
    const ConjunctiveQuery fork{"F", {}, {Atom{"R", {X("x"), X("y")}}, Atom{"R", {X("x"), X("z")}}}};

    TEST_CASE("fold of a fork") {
        auto r = is_minimal(fork);
        CHECK_FALSE(r.minimal);
        REQUIRE(r.folding);
        REQUIRE(r.subquery);
        CHECK(r.subquery->atoms.size() == 1);
        CHECK(is_homomorphism(fork.atoms, build_canondb(*r.subquery), [&] {
            Assignment h;
            for (const auto& [k, v] : *r.folding) h[k] = v.is_variable() ? frozen(v) : v;
            return h;
        }()));
        auto m = minimize(fork);
        CHECK(m.atoms.size() == 1);
        CHECK(hom_equivalent(m, fork));
    }

    TEST_CASE("minimal examples") {
        auto ws = fixture("square.vf");
        CHECK(is_minimal(ws.query("Q")).minimal);
        CHECK(brute_minimal(ws.query("Q")));
        ConjunctiveQuery one{"O", {}, {Atom{"R", {X("x"), X("y")}}}};
        CHECK(is_minimal(one).minimal);
        CHECK(minimize(one) == one);
    }

    TEST_CASE("loop absorbs an edge") {
        ConjunctiveQuery q{"T", {}, {Atom{"T", {X("x"), X("y")}}, Atom{"T", {X("x"), X("x")}}}};
        auto m = minimize(q);
        CHECK(m.atoms == std::vector<Atom>{Atom{"T", {X("x"), X("x")}}});
        CHECK(brute_exists(q.atoms, build_canondb(m)));
        CHECK(brute_exists(m.atoms, build_canondb(q)));
    }

    TEST_CASE("free variables are kept") {
        ConjunctiveQuery q{"F", {X("z")}, {Atom{"R", {X("x"), X("y")}}, Atom{"R", {X("x"), X("z")}}}};
        auto m = minimize(q);
        CHECK(m.atoms == std::vector<Atom>{Atom{"R", {X("x"), X("z")}}});
        CHECK(hom_equivalent(m, q));
    }

    TEST_CASE("random queries against exhaustive search") {
        std::mt19937 rng(17);
        std::vector<RelationSymbol> rels{{"R", 2, {"s"}}, {"U", 1, {"s"}}};
        for (int k = 0; k < 200; ++k) {
            auto q = random_cq(rng, rels, 5, 4);
            auto vs = q.variables();
            if (k % 3 == 0 && !vs.empty()) q.free_vars = {vs.front()};
            CHECK(is_minimal(q).minimal == brute_minimal(q));
            auto m = minimize(q);
            CHECK(hom_equivalent(m, q));
            CHECK(brute_minimal(m));
            CHECK(minimize(m) == m);
            if (brute_minimal(m)) {
                // no endomorphism of a minimal query merges two variables
                std::map<Term, Term> pin;
                for (const auto& v : m.free_vars) pin[v] = frozen(v);
                for (const auto& h : brute_homs(m.atoms, build_canondb(m), pin)) {
                    std::set<Term> img;
                    for (const auto& v : m.variables()) img.insert(h.at(v));
                    CHECK(img.size() == m.variables().size());
                }
            }
        }
    }

    TEST_CASE("equivalence under rules") {
        std::vector<ExistentialRule> rules{
            {"rs", {Atom{"R1", {X("x"), X("y")}}}, {Atom{"S1", {X("x"), X("y")}}}, std::nullopt},
            {"sr", {Atom{"S1", {X("x"), X("y")}}}, {Atom{"R1", {X("x"), X("y")}}}, std::nullopt}};
        ConjunctiveQuery r{"A", {}, {Atom{"R1", {X("x"), X("y")}}}};
        ConjunctiveQuery s{"B", {}, {Atom{"S1", {X("x"), X("y")}}}};
        CHECK(equivalent_under_rules(r, r, {}) == Tri::Yes);
        CHECK(equivalent_under_rules(r, s, rules) == Tri::Yes);
        CHECK(equivalent_under_rules(r, s, {}) == Tri::No);
        ConjunctiveQuery loop{"L", {}, {Atom{"R1", {X("x"), X("x")}}}};
        CHECK(equivalent_under_rules(loop, r, {}) == Tri::No);
        CHECK(entails_under_rules(loop, r, {}) == Tri::Yes);

        ConjunctiveQuery both{"C", {}, {Atom{"R1", {X("x"), X("y")}}, Atom{"S1", {X("x"), X("y")}}}};
        auto m = minimize_under_rules(both, rules);
        REQUIRE(m);
        CHECK(m->atoms.size() == 1);
        CHECK(minimize_under_rules(both, {}) == minimize(both));

        std::vector<ExistentialRule> grow{
            {"g", {Atom{"R1", {X("x"), X("y")}}}, {Atom{"R1", {X("y"), X("z")}}}, std::nullopt}};
        ChaseConfig tiny;
        tiny.max_steps = 3;
        ConjunctiveQuery two{"D", {}, {Atom{"R1", {X("x"), X("y")}}, Atom{"S1", {X("x"), X("x")}}}};
        CHECK_FALSE(minimize_under_rules(two, grow, tiny));
    }
}

TEST_SUITE("determinacy") {
    TEST_CASE("view rules") {
        View v{"V", "s", ConjunctiveQuery{"V", {X("x")}, {Atom{"R", {X("x"), X("y")}}, Atom{"S", {X("x"), X("z")}}}}};
        DView dv{"d", {v}};
        auto rs = make_view_rules(dv);
        REQUIRE(rs.for_view.size() == 1);
        REQUIRE(rs.back_view.size() == 1);
        const auto& fw = rs.for_view[0];
        CHECK(fw.body == v.cq().atoms);
        CHECK(fw.head == std::vector<Atom>{Atom{view_relation("V"), {X("x")}}});
        const auto& bw = rs.back_view[0];
        CHECK(bw.head == v.cq().atoms);
        CHECK(bw.existential_vars() == vars({"y", "z"}));
        const auto& bwp = rs.back_view_primed[0];
        CHECK(bwp.head[0].relation == primed("R"));
        CHECK(bwp.body[0].relation == view_relation("V"));
        CHECK(rs.prime_map.at("R") == primed("R"));

        View b{"B", "s", ConjunctiveQuery{"B", {}, {Atom{"R", {X("x"), X("y")}}}}};
        auto two = make_view_rules(DView{"d2", {v, b}});
        CHECK(two.for_view.size() + two.back_view.size() + two.for_view_primed.size() +
                  two.back_view_primed.size() ==
              8);
        CHECK(two.for_view[1].head[0].args.empty());

        auto ms = fixture("makesafe.vf");
        CHECK_THROWS_AS(make_view_rules(DView{"m", {ms.view("V")}}), NonCQView);
    }

    TEST_CASE("example1") {
        auto ws = fixture("example1.vf");
        auto v = check_determinacy(ws.query("Q"), ws.dview("canonical"));
        CHECK(v.outcome == DeterminacyOutcome::Determined);
        CHECK(v.round == 1);
        for (const auto& f : ws.query("Q").free_vars) CHECK(v.match.at(f) == frozen(f));
        CHECK(check_determinacy(ws.query("Qb"), ws.dview("canonical_b")).outcome == DeterminacyOutcome::Determined);

        auto n = check_determinacy(ws.query("Q"), ws.dview("nopid"));
        CHECK(n.outcome == DeterminacyOutcome::NotDetermined);
        CHECK(validate_determinacy_witness(ws.query("Q"), ws.dview("nopid"), n.witness_left, n.witness_right) == "");
        // the pair is a real counterexample, checked by brute force
        CHECK(views_agree(ws.dview("nopid"), n.witness_left, n.witness_right));
        Tuple c{frozen(X("tinfo")), frozen(X("age"))};
        CHECK(brute_matches(ws.query("Q"), n.witness_left).count(c));
        CHECK_FALSE(brute_matches(ws.query("Q"), n.witness_right).count(c));
    }

    TEST_CASE("square designs with replication") {
        auto ws = fixture("square.vf");
        for (auto name : {"design1", "design2", "design2b", "design3"}) {
            CAPTURE(name);
            auto v = check_determinacy(ws.query("Q"), ws.dview(name));
            CHECK(v.outcome == DeterminacyOutcome::Determined);
            CHECK(v.round == 1);
        }
        auto c = check_determinacy(ws.query("Q"), canonical_dview(ws.query("Q"), ws.schema));
        CHECK(c.outcome == DeterminacyOutcome::Determined);
    }

    TEST_CASE("backward homomorphism at every round") {
        auto ws = fixture("example1.vf");
        for (auto name : {"canonical", "nopid", "pidonly"}) {
            const auto& dv = ws.dview(name);
            const auto& q = ws.query("Q");
            auto v = check_determinacy(q, dv);
            auto rs = make_view_rules(dv);
            REQUIRE(!v.rounds.empty());
            for (const auto& r : v.rounds) {
                std::map<Term, Term> pin;
                for (const auto& f : q.free_vars) pin[frozen(f)] = frozen(f);
                auto back = unprime(r.f2, rs.prime_map).facts();
                CHECK(find_homomorphism(back, r.f0, pin));
            }
        }
    }

    TEST_CASE("oracle never refutes a Determined verdict") {
        auto ws = fixture("example1.vf");
        OracleBounds b;
        b.domain_size = 2;
        b.max_facts = 1;
        auto r = refute_determinacy(ws.query("Qb"), ws.dview("canonical_b"), ws.schema, b);
        CHECK_FALSE(r.found);
        auto n = refute_determinacy(ws.query("Q"), ws.dview("nopid"), ws.schema, b);
        CHECK(n.found);
    }

    TEST_CASE("round and fuel limits give Unknown") {
        auto ws = fixture("example1.vf");
        DeterminacyConfig cfg;
        cfg.fuel = 1;
        auto v = check_determinacy(ws.query("Q"), ws.dview("canonical"), {}, cfg);
        CHECK(v.outcome == DeterminacyOutcome::Unknown);
    }
}
