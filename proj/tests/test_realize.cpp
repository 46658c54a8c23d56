#include <gtest/gtest.h>

#include "sandk/sandk.hpp"

using namespace sandk;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorKind::InternalInvariant;
}

const Claim* find_claim(const RealizationReport& r, std::string_view prefix) {
    for (const auto& c : r.claims)
        if (c.name.starts_with(prefix)) return &c;
    return nullptr;
}

}  // namespace

TEST(Conicality, Examples) {
    EXPECT_TRUE(conicality_report(make_G_nk(2, 3)).conical);
    const auto z = make_two_vertex_sandpile(0, 2);
    const auto r = conicality_report(z);
    EXPECT_FALSE(r.conical);
    EXPECT_EQ(r.witnesses, VertexSet{0});
    EXPECT_FALSE(is_conical(enumerate_sandpile_monoid(z)));

    WeightedDigraph chain;
    chain.add_vertex("a");
    chain.add_vertex("b");
    chain.add_vertex("s");
    chain.add_edge("a", "b");
    chain.add_edge("b", "s");
    const auto sg = validate_sandpile(chain);
    EXPECT_TRUE(conicality_report(sg).conical);
    EXPECT_EQ(enumerate_sandpile_monoid(sg).size(), 1u);
}

TEST(Realization, Gnk) {
    for (std::size_t n = 1; n <= 5; ++n)
        for (std::size_t k = 1; k <= 5; ++k) {
            const auto r = realization(make_G_nk(n, k));
            EXPECT_TRUE(r.ok()) << n << "," << k;
            EXPECT_TRUE(r.conical);
            ASSERT_TRUE(r.isomorphism.has_value());
            EXPECT_EQ(r.weighted.size(), n + k);
            EXPECT_TRUE(monoid_isomorphic(r.weighted, make_Mnk(n, k)).has_value());
            EXPECT_EQ(r.k0, invariants_from_moduli({BigInt(k)}));
            EXPECT_EQ(r.sandpile_group, r.k0);
            ASSERT_EQ(r.quotient.vertex_count(), 1u);
            EXPECT_EQ(r.quotient.vertex_weight(0), n + k);
        }
}

TEST(Realization, Triangle) {
    const auto r = realization(make_triangle_sandpile());
    EXPECT_TRUE(r.ok());
    EXPECT_EQ(r.sp.size(), 27u);
    EXPECT_EQ(r.weighted.size(), 27u);
    EXPECT_EQ(r.k0.to_string(), "Z8");
    // The map is a verified homomorphism.
    const auto& f = *r.isomorphism;
    for (ElementIndex a = 0; a < r.sp.size(); ++a)
        for (ElementIndex b = 0; b < r.sp.size(); ++b) EXPECT_EQ(f[r.sp.add(a, b)], r.weighted.add(f[a], f[b]));
}

TEST(Realization, SinkOnly) {
    WeightedDigraph g;
    g.add_vertex("s");
    const auto r = realization(validate_sandpile(g));
    EXPECT_TRUE(r.ok());
    EXPECT_EQ(r.sp.size(), 1u);
    EXPECT_EQ(r.weighted.size(), 1u);
    EXPECT_TRUE(r.sandpile_group.is_trivial());
}

TEST(Realization, NonConicalUsesQuotient) {
    WeightedDigraph g;  // a cycle a <-> b fed by c, which has two sink edges
    g.add_vertex("a");
    g.add_vertex("b");
    g.add_vertex("c");
    g.add_vertex("s");
    g.add_edge("a", "b");
    g.add_edge("a", "s");
    g.add_edge("b", "a");
    g.add_edge("b", "s");
    g.add_edge("c", "s");
    g.add_edge("c", "s");
    const auto sg = validate_sandpile(g);
    const auto r = realization(sg);
    EXPECT_FALSE(r.conical);
    EXPECT_EQ(r.conicality_witnesses, VertexSet{2});
    EXPECT_TRUE(r.ok());
    EXPECT_EQ(r.units.size(), 2u);
    const Claim* q = find_claim(r, "SP(E)/Z(SP(E))");
    ASSERT_NE(q, nullptr);
    EXPECT_TRUE(q->holds);
    EXPECT_EQ(find_claim(r, "G(E)"), nullptr);
    EXPECT_TRUE(monoid_isomorphic(quotient_by_submonoid(r.sp, r.units), r.weighted).has_value());
}

TEST(LemmaVertex, Examples) {
    const auto g = make_cycle_companion_G({2, 2, 1});
    // v1 emits one edge to v2 and one to the sink; v3 only feeds v1.
    const auto u = find_lemma_vertex(g, 1);
    ASSERT_TRUE(u.has_value());
    EXPECT_EQ(g.name(*u), "v1");
    EXPECT_FALSE(find_lemma_vertex(g, 0).has_value());
    EXPECT_FALSE(find_lemma_vertex(make_G_nk(2, 3), 0).has_value());
}

TEST(RefinementStructure, Examples) {
    const auto g = make_cycle_companion_G({2, 2, 1});
    EXPECT_EQ(kind_of([&] { refinement_structure(g); }), ErrorKind::NotReduced);
    // Contracting v3 leaves the cycle v1 -> v2 -> v1.
    const auto out = refinement_structure(reduce_graph(g));
    ASSERT_TRUE(out.classes.has_value());
    ASSERT_EQ(out.classes->size(), 1u);
    EXPECT_EQ(out.classes->front().cycle.size(), 2u);
    EXPECT_EQ(out.classes->front().order, 4u);
    EXPECT_TRUE(monoid_isomorphic(out.sp, make_Cn(4)).has_value());

    const auto none = refinement_structure(make_G_nk(2, 3));
    EXPECT_FALSE(none.classes.has_value());
    ASSERT_TRUE(none.counterexample.has_value());

    const auto two = refinement_structure(make_refinement_graph({{2, 2}, {3}}));
    ASSERT_TRUE(two.classes.has_value());
    std::vector<std::size_t> orders;
    for (const auto& c : *two.classes) orders.push_back(c.order);
    std::sort(orders.begin(), orders.end());
    EXPECT_EQ(orders, (std::vector<std::size_t>{3, 4}));
    EXPECT_EQ(classify_cyclic_sum(two.sp), orders);
}

TEST(RefinementStructure, Errors) {
    EXPECT_EQ(kind_of([] { refinement_structure(make_two_vertex_sandpile(0, 3)); }), ErrorKind::NotConical);
    WeightedDigraph chain;
    chain.add_vertex("a");
    chain.add_vertex("b");
    chain.add_vertex("s");
    chain.add_edge("a", "a");
    chain.add_edge("a", "b");
    chain.add_edge("b", "s");
    EXPECT_EQ(kind_of([&] { refinement_structure(validate_sandpile(chain)); }), ErrorKind::NotReduced);
}

TEST(PrimeClassifier, Examples) {
    const auto zp = prime_classifier(make_two_vertex_sandpile(0, 5));
    EXPECT_EQ(zp.kind, PrimeClassification::Kind::ZpCase);
    EXPECT_EQ(zp.p, 5u);
    EXPECT_TRUE(zp.verified);
    EXPECT_FALSE(conicality_report(make_two_vertex_sandpile(0, 5)).conical);

    const auto m = prime_classifier(make_G_nk(2, 3));
    EXPECT_EQ(m.kind, PrimeClassification::Kind::MCase);
    EXPECT_EQ(m.p, 5u);
    EXPECT_EQ(m.n, 2u);
    EXPECT_TRUE(m.verified);

    EXPECT_EQ(prime_classifier(make_G_nk(1, 3)).kind, PrimeClassification::Kind::NotPrimeOrder);
    EXPECT_EQ(prime_classifier(make_refinement_graph({{2}, {2}})).kind, PrimeClassification::Kind::NotPrimeOrder);
    EXPECT_EQ(prime_kind_name(PrimeClassification::Kind::MCase), "MCase");
}

TEST(WeightedCycleSuite, Examples) {
    const auto r = weighted_cycle_suite({2, 2, 1});
    EXPECT_TRUE(r.ok());
    EXPECT_EQ(r.n, 4u);
    EXPECT_EQ(r.weighted_size, 4u);
    EXPECT_EQ(r.companion_f_size, 4u);
    EXPECT_EQ(r.sandpile_size, 4u);

    const auto six = weighted_cycle_suite({3, 2});
    EXPECT_TRUE(six.ok());
    EXPECT_EQ(six.n, 6u);

    for (Weight n = 2; n <= 6; ++n) {
        const auto single = weighted_cycle_suite({n});
        EXPECT_TRUE(single.ok());
        EXPECT_TRUE(monoid_isomorphic(enumerate_weighted_monoid(make_rose(1, n), MonoidVariant::NoSinkRelations),
                                      make_Cn(n))
                        .has_value());
    }
    EXPECT_EQ(kind_of([] { weighted_cycle_suite({1, 1, 1}); }), ErrorKind::BadParameters);
}
