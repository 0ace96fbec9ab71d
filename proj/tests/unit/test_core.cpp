#include <doctest.h>

#include "../support/oracles.hpp"
#include "viewforge/chase.hpp"
#include "viewforge/disclosure.hpp"
#include "viewforge/homomorphism.hpp"

using namespace viewforge;
using namespace vf_test;

TEST_SUITE("core-model") {
    TEST_CASE("canondb freezes variables") {
        auto ws = fixture("square.vf");
        auto db = build_canondb(ws.query("Q"));
        Instance expect({Atom{"T", {C("c_x"), C("c_y")}}, Atom{"S", {C("c_y"), C("c_z")}},
                         Atom{"T", {C("c_z"), C("c_w")}}, Atom{"P", {C("c_w"), C("c_x")}}});
        CHECK(db == expect);
        ConjunctiveQuery loop{"L", {}, {Atom{"R", {X("x"), X("x")}}}};
        CHECK(build_canondb(loop) == Instance({Atom{"R", {C("c_x"), C("c_x")}}}));
    }

    TEST_CASE("active domain") {
        CHECK(active_domain(Instance{}).empty());
        Instance i({Atom{"R", {C("a"), C("b")}}, Atom{"S", {C("b")}}});
        CHECK(active_domain(i) == std::set<Term>{C("a"), C("b")});
        DSchema s;
        s.add_source("s");
        s.add_relation({"R", 2, {"s"}});
        CHECK(active_domain(critical_facts(s)) == std::set<Term>{C("*")});
    }

    TEST_CASE("critical instance") {
        DSchema s;
        CHECK(critical_facts(s).empty());
        s.add_source("s");
        s.add_relation({"R", 2, {"s"}});
        s.add_relation({"S", 1, {"s"}});
        Instance expect({Atom{"R", {C("*"), C("*")}}, Atom{"S", {C("*")}}});
        CHECK(critical_facts(s) == expect);
        CHECK(validate_dschema(s, critical_instance(s)).empty());
    }

    TEST_CASE("validate_dschema") {
        auto ws = fixture("square.vf");
        DInstance ok = DInstance::distribute(ws.schema, Instance({Atom{"T", {C("a"), C("b")}}}));
        CHECK(validate_dschema(ws.schema, ok).empty());
        DInstance bad;
        bad.add("s", Atom{"T", {C("a"), C("b")}});
        auto v = validate_dschema(ws.schema, bad);
        REQUIRE(!v.empty());
        CHECK(v.front().kind == "replication");
        DInstance arity;
        arity.add("s", Atom{"S", {C("a")}});
        auto v2 = validate_dschema(ws.schema, arity);
        REQUIRE(!v2.empty());
        CHECK(v2.front().kind == "arity");
    }

    TEST_CASE("schema errors") {
        DSchema s;
        s.add_source("a");
        s.add_relation({"R", 1, {"a"}});
        CHECK_THROWS_AS(s.add_relation({"R", 1, {"a"}}), InputError);
        CHECK_THROWS_AS(s.add_relation({"Q", 1, {"zzz"}}), InputError);
        CHECK_THROWS_AS(Atom(*s.find("R"), {C("a"), C("b")}), InputError);
    }

    TEST_CASE("pair height") {
        Term a = C("a");
        Term p = Term::pair(a, X("x"));
        Term pp = Term::pair(p, a);
        CHECK(a.pair_height() == 0);
        CHECK(p.pair_height() == 1);
        CHECK(pp.pair_height() == 2);
        CHECK(Term::pair(a, a) == Term::pair(a, a));
    }

    TEST_CASE("query checks") {
        ConjunctiveQuery bad{"B", {X("z")}, {Atom{"R", {X("x")}}}};
        CHECK_THROWS_AS(bad.check(), InputError);
    }
}

TEST_SUITE("homomorphism") {
    TEST_CASE("basic examples") {
        Instance ab({Atom{"R", {C("a"), C("b")}}});
        auto h = find_homomorphism(std::vector<Atom>{Atom{"R", {X("x"), X("y")}}}, ab);
        REQUIRE(h);
        CHECK(h->at(X("x")) == C("a"));
        CHECK(h->at(X("y")) == C("b"));
        CHECK_FALSE(find_homomorphism(std::vector<Atom>{Atom{"R", {X("x"), X("x")}}}, ab));
        auto ws = fixture("square.vf");
        CHECK_FALSE(find_homomorphism(ws.secret("p1").atoms, build_canondb(ws.query("Q"))));
        CHECK_FALSE(brute_exists(ws.secret("p1").atoms, build_canondb(ws.query("Q"))));
    }

    TEST_CASE("enumerate_matches examples") {
        ConjunctiveQuery q{"Q", {X("x")}, {Atom{"R", {X("x"), X("y")}}}};
        Instance i({Atom{"R", {C("a"), C("b")}}, Atom{"R", {C("a"), C("c")}}});
        CHECK(enumerate_matches(q, i) == TupleSet{{C("a")}});
        auto ws = fixture("square.vf");
        const auto& sq = ws.query("Q");
        CHECK(enumerate_matches(sq, build_canondb(sq)) == TupleSet{Tuple{}});
        Instance collapse({Atom{"T", {C("a"), C("a")}}, Atom{"S", {C("a"), C("a")}}, Atom{"P", {C("a"), C("a")}}});
        CHECK(holds(sq, collapse));
    }

    TEST_CASE("agrees with exhaustive enumeration on random inputs") {
        std::mt19937 rng(7);
        std::vector<RelationSymbol> rels{{"R", 2, {"s"}}, {"U", 1, {"s"}}};
        for (int round = 0; round < 150; ++round) {
            auto q = random_cq(rng, rels, 3, 3);
            auto vars = q.variables();
            if (!vars.empty() && round % 2) q.free_vars = {vars.front()};
            auto inst = random_instance(rng, rels, 4, 4);
            CHECK(enumerate_matches(q, inst) == brute_matches(q, inst));
            CHECK(holds(q, inst) == !brute_matches(q, inst).empty());
        }
    }

    TEST_CASE("composition of returned homomorphisms") {
        std::mt19937 rng(11);
        std::vector<RelationSymbol> rels{{"R", 2, {"s"}}};
        int composed = 0;
        for (int round = 0; round < 200; ++round) {
            auto a = random_instance(rng, rels, 3, 3);
            auto b = random_instance(rng, rels, 3, 4);
            auto c = random_instance(rng, rels, 2, 3);
            std::vector<Atom> src;
            for (auto f : a.facts()) {
                for (auto& t : f.args) t = X("v" + t.name());
                src.push_back(f);
            }
            auto h = find_homomorphism(src, b);
            if (!h) continue;
            auto hb = substitute(src, *h);
            std::vector<Atom> mid;
            for (auto f : hb) {
                for (auto& t : f.args) t = X("w" + t.name());
                mid.push_back(f);
            }
            auto g = find_homomorphism(mid, c);
            if (!g) continue;
            CHECK(Instance(substitute(mid, *g)).size() <= c.size());
            for (const auto& f : substitute(mid, *g)) CHECK(c.contains(f));
            ++composed;
        }
        CHECK(composed > 0);
    }

    TEST_CASE("pinned and injective options") {
        Instance i({Atom{"R", {C("a"), C("b")}}, Atom{"R", {C("a"), C("a")}}});
        std::vector<Atom> src{Atom{"R", {X("x"), X("y")}}};
        auto h = find_homomorphism(src, i, {{X("y"), C("a")}});
        REQUIRE(h);
        CHECK(h->at(X("x")) == C("a"));
        HomOptions inj;
        inj.injective = true;
        std::size_t n = 0;
        for_each_homomorphism(src, i, {}, inj, [&](const Assignment& g) {
            CHECK_FALSE(g.at(X("x")) == g.at(X("y")));
            ++n;
            return true;
        });
        CHECK(n == 1);
    }

    TEST_CASE("cq homomorphism fixes free variables") {
        ConjunctiveQuery a{"A", {X("x")}, {Atom{"R", {X("x"), X("y")}}, Atom{"R", {X("x"), X("z")}}}};
        ConjunctiveQuery b{"B", {X("x")}, {Atom{"R", {X("x"), X("y")}}}};
        CHECK(hom_equivalent(a, b));
        ConjunctiveQuery c{"C", {X("y")}, {Atom{"R", {X("x"), X("y")}}}};
        CHECK_FALSE(find_cq_homomorphism(b, c));
    }
}

TEST_SUITE("chase") {
    TEST_CASE("single tgd step") {
        ExistentialRule r{"r", {Atom{"A", {X("x")}}}, {Atom{"B", {X("x"), X("y")}}}, std::nullopt};
        auto res = run_chase(Instance({Atom{"A", {C("a")}}}), std::vector<ExistentialRule>{r});
        CHECK(res.completed);
        CHECK(res.instance.size() == 2);
        const auto& b = res.instance.tuples("B");
        REQUIRE(b.size() == 1);
        CHECK(b.begin()->at(0) == C("a"));
        CHECK(b.begin()->at(1).is_null());
        CHECK(replay_trace(Instance({Atom{"A", {C("a")}}}), res.trace) == res.instance);
    }

    TEST_CASE("inverse view rule") {
        ExistentialRule r{"bw", {Atom{"V", {X("x")}}}, {Atom{"R", {X("x"), X("y")}}, Atom{"S", {X("x"), X("y")}}},
                          std::nullopt};
        auto res = run_chase(Instance({Atom{"V", {C("*")}}}), std::vector<ExistentialRule>{r});
        REQUIRE(res.completed);
        const auto& rt = res.instance.tuples("R");
        const auto& st = res.instance.tuples("S");
        REQUIRE(rt.size() == 1);
        CHECK(rt == st);
        CHECK(rt.begin()->at(0) == C("*"));
    }

    TEST_CASE("fuel exhaustion") {
        ExistentialRule r{"r", {Atom{"R", {X("x"), X("y")}}}, {Atom{"R", {X("y"), X("z")}}}, std::nullopt};
        ChaseConfig cfg;
        cfg.max_steps = 5;
        auto res = run_chase(Instance({Atom{"R", {C("a"), C("b")}}}), std::vector<ExistentialRule>{r}, cfg);
        CHECK_FALSE(res.completed);
        CHECK(res.pending_triggers > 0);
        CHECK_FALSE(is_weakly_acyclic(std::vector<ExistentialRule>{r}).weakly_acyclic);
    }

    TEST_CASE("weak acyclicity") {
        ExistentialRule r{"r", {Atom{"A", {X("x")}}}, {Atom{"B", {X("x"), X("y")}}}, std::nullopt};
        CHECK(is_weakly_acyclic(std::vector<ExistentialRule>{r}).weakly_acyclic);
        ExistentialRule eq{"e", {Atom{"A", {X("x")}}, Atom{"A", {X("y")}}}, {}, std::make_pair(X("x"), X("y"))};
        CHECK_THROWS_AS(is_weakly_acyclic(std::vector<ExistentialRule>{eq}), InputError);
    }

    TEST_CASE("equality rules") {
        ExistentialRule mk{"mk", {Atom{"A", {X("x")}}}, {Atom{"B", {X("x"), X("y")}}}, std::nullopt};
        ExistentialRule fd{"fd", {Atom{"B", {X("x"), X("y")}}, Atom{"B", {X("x"), X("z")}}}, {},
                           std::make_pair(X("y"), X("z"))};
        Instance start({Atom{"A", {C("a")}}, Atom{"B", {C("a"), C("b")}}});
        auto res = run_chase(start, std::vector<ExistentialRule>{mk, fd});
        CHECK(res.completed);
        CHECK(satisfies(res.instance, std::vector<ExistentialRule>{mk, fd}));
        Instance clash({Atom{"B", {C("a"), C("b")}}, Atom{"B", {C("a"), C("c")}}});
        CHECK_THROWS_AS(run_chase(clash, std::vector<ExistentialRule>{fd}), EqualityClash);
    }

    TEST_CASE("replay determinism and completion on weakly acyclic rules") {
        std::vector<ExistentialRule> rules{
            {"r1", {Atom{"A", {X("x")}}}, {Atom{"B", {X("x"), X("y")}}}, std::nullopt},
            {"r2", {Atom{"B", {X("x"), X("y")}}}, {Atom{"C", {X("y")}}}, std::nullopt},
            {"r3", {Atom{"C", {X("x")}}, Atom{"A", {X("z")}}}, {Atom{"B", {X("z"), X("x")}}}, std::nullopt}};
        REQUIRE(is_weakly_acyclic(rules).weakly_acyclic);
        std::mt19937 rng(3);
        std::vector<RelationSymbol> rels{{"A", 1, {"s"}}, {"B", 2, {"s"}}, {"C", 1, {"s"}}};
        for (int k = 0; k < 20; ++k) {
            auto i = random_instance(rng, rels, 3, 3);
            auto r1 = run_chase(i, rules);
            auto r2 = run_chase(i, rules);
            CHECK(r1.completed);
            CHECK(r1.instance == r2.instance);
            CHECK(trace_to_jsonl(r1.trace) == trace_to_jsonl(r2.trace));
            CHECK(satisfies(r1.instance, rules));
        }
    }

    TEST_CASE("universality spot check") {
        std::vector<ExistentialRule> rules{{"r1", {Atom{"A", {X("x")}}}, {Atom{"B", {X("x"), X("y")}}}, std::nullopt},
                                           {"r2", {Atom{"B", {X("x"), X("y")}}}, {Atom{"C", {X("y")}}}, std::nullopt}};
        Instance i({Atom{"A", {C("d1")}}});
        auto ch = run_chase(i, rules);
        REQUIRE(ch.completed);
        std::vector<Term> dom{C("d1"), C("d2"), C("d3")};
        int models = 0;
        for (const auto& y : dom)
            for (const auto& extra : dom) {
                Instance j = i;
                j.add("B", {C("d1"), y});
                j.add("C", {y});
                j.add("C", {extra});
                if (!satisfies(j, rules)) continue;
                ++models;
                std::map<Term, Term> fix;
                for (const auto& t : active_domain(i)) fix[t] = t;
                CHECK(find_homomorphism(ch.instance.facts(), j, fix));
                CHECK(brute_exists(ch.instance.facts(), j, fix));
            }
        CHECK(models > 0);
    }
}
