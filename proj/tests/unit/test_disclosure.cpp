#include <doctest.h>

#include "../support/oracles.hpp"
#include "viewforge/canonical_views.hpp"
#include "viewforge/disclosure.hpp"
#include "viewforge/oracle.hpp"
#include "viewforge/replication.hpp"
#include "viewforge/shuffle_views.hpp"

using namespace viewforge;
using namespace vf_test;

namespace {

Term P(const Term& a, const Term& b) { return Term::pair(a, b); }

// Canonical view of the secret on each source, one disclosure check per source.
bool decomposed_disclosing(const DView& dv, const ConjunctiveQuery& p, const DSchema& schema) {
    for (const auto& s : sources_of(p, schema)) {
        auto v = canonical_view(p, s, schema);
        ConjunctiveQuery part = v.cq();
        if (check_un_disclosure_cq(dv, part, schema).outcome != DisclosureOutcome::Disclosing) return false;
    }
    return true;
}

}  // namespace

TEST_SUITE("disclosure") {
    TEST_CASE("example1") {
        auto ws = fixture("example1.vf");
        auto v = check_un_disclosure_cq(ws.dview("canonical"), ws.secret("P_closure"), ws.schema);
        CHECK(v.outcome == DisclosureOutcome::Disclosing);
        CHECK(is_homomorphism(ws.secret("P_closure").atoms, v.certificate, v.secret_match));
        auto j = check_un_disclosure_cq(ws.dview("canonical"), ws.secret("P_join"), ws.schema);
        CHECK(j.outcome == DisclosureOutcome::Disclosing);
        auto n = check_un_disclosure_cq(ws.dview("nopid"), ws.secret("P_join"), ws.schema);
        CHECK(n.outcome == DisclosureOutcome::NonDisclosing);
        CHECK(validate_nondisclosure_witness(ws.dview("nopid"), ws.secret("P_join"), ws.schema, n.witness) == "");
    }

    TEST_CASE("square designs") {
        auto ws = fixture("square.vf");
        auto d1 = check_un_disclosure_cq(ws.dview("design1"), ws.secret("p1"), ws.schema);
        CHECK(d1.outcome == DisclosureOutcome::NonDisclosing);
        CHECK(validate_nondisclosure_witness(ws.dview("design1"), ws.secret("p1"), ws.schema, d1.witness) == "");
        // independent re-check of the witness
        CHECK(views_agree(ws.dview("design1"), d1.witness, critical_facts(ws.schema)));
        CHECK(brute_matches(ws.secret("p1"), d1.witness).empty());

        ConjunctiveQuery whole = ws.query("Q");
        CHECK(check_un_disclosure_cq(ws.dview("design1"), whole, ws.schema).outcome == DisclosureOutcome::Disclosing);
    }

    TEST_CASE("decomposition consistency on fixtures without replication") {
        for (auto file : {"example1.vf", "es_symmetric.vf"}) {
            auto ws = fixture(file);
            auto dviews = ws.dviews;
            for (const auto& q : ws.queries) dviews.push_back(canonical_dview(q, ws.schema));
            for (const auto& dv : dviews)
                for (const auto& p : ws.secrets) {
                    if (!p.is_boolean()) continue;
                    CAPTURE(dv.name);
                    CAPTURE(p.name);
                    bool direct = check_un_disclosure_cq(dv, p, ws.schema).outcome == DisclosureOutcome::Disclosing;
                    CHECK(direct == decomposed_disclosing(dv, p, ws.schema));
                }
        }
    }

    TEST_CASE("every NonDisclosing witness validates") {
        for (auto file : {"example1.vf", "square.vf"}) {
            auto ws = fixture(file);
            for (const auto& dv : ws.dviews)
                for (const auto& p : ws.secrets) {
                    auto v = check_un_disclosure_cq(dv, p, ws.schema);
                    REQUIRE(v.outcome != DisclosureOutcome::Unknown);
                    if (v.outcome == DisclosureOutcome::NonDisclosing)
                        CHECK(validate_nondisclosure_witness(dv, p, ws.schema, v.witness) == "");
                }
        }
    }

    TEST_CASE("useful and non-disclosing in the CQ class") {
        auto ex = fixture("example1.vf");
        auto r = exists_useful_nondisclosing_cq(ex.query("Qb"), ex.secret("P_closure"), ex.schema);
        CHECK(r.answer == Tri::No);
        CHECK(r.decomposition_consistent);

        auto es = fixture("es_symmetric.vf");
        // a coloured loop is Q-equivalent only to instances containing that loop
        auto l = exists_useful_nondisclosing_cq(es.query("Q"), es.secret("loop"), es.schema);
        CHECK(l.answer == Tri::No);
        CHECK(l.decomposition_consistent);

        ConjunctiveQuery sub{"sub", {}, {es.query("Q").atoms[0]}};
        CHECK(exists_useful_nondisclosing_cq(es.query("Q"), sub, es.schema).answer == Tri::No);
    }

    TEST_CASE("oracle agreement on fixtures") {
        auto ws = fixture("example1.vf");
        OracleBounds b;
        b.domain_size = 1;
        b.max_facts = 1;
        auto o = check_un_disclosure_oracle(ws.dview("canonical_b"), ws.secret("P_closure"), ws.schema, b);
        CHECK(o.disclosing);
        CHECK(active_domain(o.witness).size() == 1);
        CHECK(holds(ws.secret("P_closure"), o.witness));
        DView empty{"none", {}};
        b.domain_size = 2;
        CHECK_FALSE(check_un_disclosure_oracle(empty, ws.secret("P_closure"), ws.schema, b).disclosing);

        auto es = fixture("es_symmetric.vf");
        auto sd = build_shuffle_views(es.query("Q"), es.schema).dview();
        b.max_facts = 2;
        CHECK(check_un_disclosure_oracle(sd, es.secret("loop"), es.schema, b).disclosing);
        auto colours_only = DView{"e", {}};
        for (const auto* v : sd.of_source("colours")) colours_only.views.push_back(*v);
        CHECK_FALSE(check_un_disclosure_oracle(colours_only, es.secret("loop"), es.schema, b).disclosing);
    }
}

TEST_SUITE("replication") {
    TEST_CASE("synchronous products") {
        Instance ab({Atom{"R", {C("a"), C("b")}}});
        Instance cd({Atom{"R", {C("c"), C("d")}}});
        auto p = synchronous_product(ab, cd);
        CHECK(p == Instance({Atom{"R", {P(C("a"), C("c")), P(C("b"), C("d"))}}}));
        CHECK(projections_are_homomorphisms(p, ab, cd));

        Instance aa({Atom{"R", {C("a"), C("a")}}});
        ConjunctiveQuery edge{"e", {}, {Atom{"R", {X("x"), X("y")}}}};
        auto k = synchronous_product(aa, build_canondb(edge));
        CHECK(k == Instance({Atom{"R", {P(C("a"), C("c_x")), P(C("a"), C("c_y"))}}}));
        ConjunctiveQuery loop{"l", {}, {Atom{"R", {X("x"), X("x")}}}};
        CHECK_FALSE(holds(loop, k));

        Instance crit({Atom{"R", {C("*"), C("*")}}});
        auto c = synchronous_product(ab, crit);
        CHECK(c.size() == ab.size());
        CHECK(projections_are_homomorphisms(c, ab, crit));
    }

    TEST_CASE("str transform on the square") {
        auto ws = fixture("square.vf");
        const auto& q = ws.query("Q");
        const auto& d = ws.instance("sample");
        auto s = str_transform(d, q, ws.schema);
        CHECK(validate_dschema(ws.schema, s).empty());
        CHECK(min_pair_height(s.global(), {"T"}) == min_pair_height(d.global(), {"T"}).value() + 1);
        CHECK(holds(q, s.global()) == holds(q, d.global()));
        CHECK_FALSE(holds(ws.secret("p1"), s.global()));
        CHECK(str_transform(DInstance{}, q, ws.schema).global().empty());
    }

    TEST_CASE("fullrep applicability") {
        auto ws = fixture("square.vf");
        const auto& q = ws.query("Q");
        auto r = fullrep_design(q, ws.secret("p1"), ws.schema);
        CHECK(r.applicable);
        CHECK(r.replicated_relation == "T");
        CHECK(r.projections_ok);
        CHECK(r.secret_fails);
        CHECK(r.query_preserved);
        ConjunctiveQuery sub{"sub", {}, {q.atoms[0], q.atoms[1]}};
        CHECK_FALSE(fullrep_design(q, sub, ws.schema).applicable);
        auto ex = fixture("example1.vf");
        auto no = fullrep_design(ex.query("Qb"), ex.secret("P_closure"), ex.schema);
        CHECK_FALSE(no.applicable);
    }

    TEST_CASE("str equivalence") {
        auto ws = fixture("square.vf");
        const auto& q = ws.query("Q");
        const auto& d = ws.instance("sample");
        auto same = str_equivalent(d, d, q, ws.schema, 2);
        REQUIRE(same.global);
        CHECK(*same.global == 0);
        auto s = str_transform(d, q, ws.schema);
        auto once = str_equivalent(d, s, q, ws.schema, 2);
        CHECK(once.per_source_all);
        REQUIRE(once.global);
        CHECK(*once.global == 1);

        DInstance half = d;
        half.local_mut("s") = s.local("s");
        auto h = str_equivalent(d, half, q, ws.schema, 2);
        CHECK_FALSE(h.global);
    }

    TEST_CASE("usefulness across str iterates") {
        auto ws = fixture("square.vf");
        const auto& q = ws.query("Q");
        std::mt19937 rng(23);
        for (int k = 0; k < 15; ++k) {
            auto g = random_instance(rng, ws.schema.relations(), 3, 3);
            auto d = DInstance::distribute(ws.schema, g);
            auto s = str_transform(d, q, ws.schema);
            auto e = str_equivalent(d, s, q, ws.schema, 1);
            REQUIRE(e.per_source_all);
            CHECK(holds(q, d.global()) == holds(q, s.global()));
        }
    }
}

TEST_SUITE("oracle") {
    TEST_CASE("instance enumeration") {
        std::vector<RelationSymbol> u{{"U", 1, {"s"}}};
        CHECK(enumerate_instances(u, 1, 1).size() == 2);
        CHECK(enumerate_instances(u, 0, 3).size() == 1);
        std::vector<RelationSymbol> e{{"E", 2, {"s"}}};
        CHECK(enumerate_instances(e, 2, 4).size() == 16);
        CHECK(enumerate_instances(e, 2, 1).size() == 5);
        std::vector<ExistentialRule> sym{
            {"sym", {Atom{"E", {X("x"), X("y")}}}, {Atom{"E", {X("y"), X("x")}}}, std::nullopt}};
        auto closed = enumerate_instances(e, 2, 4, sym);
        CHECK(closed.size() == 8);
        for (const auto& i : closed) CHECK(satisfies(i, sym));
        CHECK(enumerate_instances(e, 2, 2) == enumerate_instances(e, 2, 2));
    }

    TEST_CASE("canonical-context equivalence") {
        auto ex = fixture("example1.vf");
        Instance a({Atom{"Trtmnt", {C("a"), C("t"), C("d")}}});
        Instance b({Atom{"Trtmnt", {C("b"), C("t"), C("d")}}});
        auto r = sq_equivalence_exact(a, b, ex.query("Qb"), "hospital", ex.schema);
        CHECK_FALSE(r.equivalent);
        REQUIRE(r.context.tuples("Patient").size() == 1);
        CHECK(r.context.tuples("Patient").begin()->at(0) == C("a"));
        CHECK(sq_equivalence_exact(a, a, ex.query("Qb"), "hospital", ex.schema).equivalent);
    }

    TEST_CASE("determinacy refutation") {
        auto ex = fixture("example1.vf");
        OracleBounds b;
        b.domain_size = 2;
        b.max_facts = 1;
        auto r = refute_determinacy(ex.query("Qb"), ex.dview("pidonly"), ex.schema, b);
        CHECK_FALSE(r.found);
        auto e = refute_determinacy(ex.query("Qb"), DView{"none", {}}, ex.schema, b);
        REQUIRE(e.found);
        CHECK(holds(ex.query("Qb"), e.left) != holds(ex.query("Qb"), e.right));
    }

    TEST_CASE("view agreement") {
        auto ex = fixture("example1.vf");
        const auto& dv = ex.dview("canonical");
        auto i1 = ex.instance("I1").global();
        CHECK(views_agree(dv, i1, i1));
        CHECK(views_agree(dv, i1, ex.instance("I2").global()));
        CHECK_FALSE(views_agree(dv, i1, ex.instance("I3").global()));
    }

    TEST_CASE("job count does not change results") {
        auto ws = fixture("square.vf");
        OracleBounds b;
        b.domain_size = 1;
        b.max_facts = 1;
        auto one = check_un_disclosure_oracle(ws.dview("design3"), ws.secret("p1"), ws.schema, b);
        b.jobs = 4;
        auto four = check_un_disclosure_oracle(ws.dview("design3"), ws.secret("p1"), ws.schema, b);
        CHECK(one.disclosing == four.disclosing);
        CHECK(one.witness == four.witness);
        std::vector<int> hits(50, 0);
        parallel_for(hits.size(), 3, [&](std::size_t i) { hits[i] += 1; });
        CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    }

    TEST_CASE("global equivalence implies query agreement") {
        auto ex = fixture("example1.vf");
        const auto& q = ex.query("Qb");
        auto all = enumerate_instances(ex.schema.relations(), 2, 1);
        for (const auto& a : all)
            for (const auto& b : all) {
                bool eq = true;
                for (const auto& s : ex.schema.sources()) {
                    auto la = a.filter([&](const std::string& r) { return ex.schema.at(r).in_source(s); });
                    auto lb = b.filter([&](const std::string& r) { return ex.schema.at(r).in_source(s); });
                    eq = eq && sq_equivalence_exact(la, lb, q, s, ex.schema).equivalent;
                }
                if (eq) CHECK(holds(q, a) == holds(q, b));
            }
    }
}
