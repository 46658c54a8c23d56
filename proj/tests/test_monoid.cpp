#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "corpus.hpp"
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

std::vector<std::string> names(const FiniteCommMonoid& m, const std::vector<ElementIndex>& xs) {
    std::vector<std::string> out;
    for (auto x : xs) out.push_back(m.label(x));
    return out;
}

// a >= b in the algebraic preorder.
bool geq(const FiniteCommMonoid& m, ElementIndex a, ElementIndex b) {
    for (ElementIndex c = 0; c < m.size(); ++c)
        if (m.add(b, c) == a) return true;
    return false;
}

// H(M) straight from its definition.
std::vector<ElementIndex> brute_h(const FiniteCommMonoid& m) {
    std::vector<ElementIndex> out;
    for (ElementIndex a = 0; a < m.size(); ++a) {
        bool top = true;
        for (ElementIndex b = 0; b < m.size() && top; ++b) top = geq(m, a, b);
        if (top) out.push_back(a);
    }
    return out;
}

bool brute_refinement(const FiniteCommMonoid& m) {
    const std::size_t n = m.size();
    for (ElementIndex a = 0; a < n; ++a)
        for (ElementIndex b = 0; b < n; ++b)
            for (ElementIndex c = 0; c < n; ++c)
                for (ElementIndex d = 0; d < n; ++d) {
                    if (m.add(a, b) != m.add(c, d)) continue;
                    bool found = false;
                    for (ElementIndex e1 = 0; e1 < n && !found; ++e1)
                        for (ElementIndex e2 = 0; e2 < n && !found; ++e2) {
                            if (m.add(e1, e2) != a) continue;
                            for (ElementIndex e3 = 0; e3 < n && !found; ++e3)
                                for (ElementIndex e4 = 0; e4 < n && !found; ++e4)
                                    found = m.add(e3, e4) == b && m.add(e1, e3) == c && m.add(e2, e4) == d;
                        }
                    if (!found) return false;
                }
    return true;
}

std::vector<ElementIndex> brute_atoms(const FiniteCommMonoid& m) {
    const auto u = units(m);
    auto is_unit = [&](ElementIndex x) { return std::find(u.begin(), u.end(), x) != u.end(); };
    std::vector<ElementIndex> out;
    for (ElementIndex a = 0; a < m.size(); ++a) {
        if (is_unit(a)) continue;
        bool atom = true;
        for (ElementIndex b = 0; b < m.size() && atom; ++b)
            for (ElementIndex c = 0; c < m.size() && atom; ++c)
                if (m.add(b, c) == a && !is_unit(b) && !is_unit(c)) atom = false;
        if (atom) out.push_back(a);
    }
    return out;
}

std::vector<std::size_t> sorted_orders(const FiniteCommMonoid& g) {
    std::vector<std::size_t> out;
    for (ElementIndex x = 0; x < g.size(); ++x) {
        std::size_t k = 1;
        for (ElementIndex y = x; y != g.zero(); y = g.add(y, x)) ++k;
        out.push_back(x == g.zero() ? 1 : k);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST(FiniteCommMonoid, RejectsBadTables) {
    EXPECT_EQ(kind_of([] { FiniteCommMonoid({"0", "a"}, 0, {0, 1, 0, 1}); }), ErrorKind::BadParameters);
    EXPECT_EQ(kind_of([] { FiniteCommMonoid({"0", "a"}, 0, {0, 1, 1}); }), ErrorKind::BadParameters);
    // 0 + a = a fails for zero = 1 in Z_2.
    EXPECT_EQ(kind_of([] { FiniteCommMonoid({"0", "a"}, 1, {0, 1, 1, 0}); }), ErrorKind::BadParameters);
    // commutative but not associative: a+a = b, a+b = 0, b+b = a.
    EXPECT_EQ(kind_of([] { FiniteCommMonoid({"0", "a", "b"}, 0, {0, 1, 2, 1, 2, 0, 2, 0, 0}); }),
              ErrorKind::BadParameters);
}

TEST(SandpileMonoid, Gnk) {
    for (std::size_t n = 1; n <= 5; ++n)
        for (std::size_t k = 1; k <= 5; ++k) {
            const auto sp = enumerate_sandpile_monoid(make_G_nk(n, k));
            EXPECT_EQ(sp.size(), n + k);
            EXPECT_TRUE(monoid_isomorphic(sp, make_Mnk(n, k)).has_value()) << n << "," << k;
        }
}

TEST(SandpileMonoid, SizesAndTrivialCase) {
    EXPECT_EQ(enumerate_sandpile_monoid(make_triangle_sandpile()).size(), 27u);
    WeightedDigraph g;
    g.add_vertex("s");
    const auto trivial = enumerate_sandpile_monoid(validate_sandpile(g));
    EXPECT_EQ(trivial.size(), 1u);
    EXPECT_EQ(trivial.label(0), "0");
    EXPECT_EQ(kind_of([] { enumerate_sandpile_monoid(make_triangle_sandpile(), 26); }), ErrorKind::SizeOverBudget);
}

TEST(SandpileMonoid, TableMatchesStabilization) {
    const auto t = make_triangle_sandpile();
    const auto sp = enumerate_sandpile_monoid(t);
    ASSERT_TRUE(sp.has_representatives());
    for (ElementIndex a = 0; a < sp.size(); ++a)
        for (ElementIndex b = 0; b < sp.size(); ++b) {
            const auto sum = stabilize(t, sp.representatives()[a] + sp.representatives()[b], true).result;
            EXPECT_EQ(sp.representatives()[sp.add(a, b)], sum);
        }
    EXPECT_EQ(sandpile_element(t, sp, parse_configuration(t.graph(), "u=4,s=9")),
              *sp.find(parse_configuration(t.graph(), "v=1,z=1,u=1")));
}

TEST(WeightedMonoid, NonStabilizingPair) {
    const auto m = enumerate_weighted_monoid(make_nonstabilizing_pair(), MonoidVariant::NoSinkRelations);
    EXPECT_EQ(m.labels(), (std::vector<std::string>{"0", "u", "v", "2u", "2v"}));
    EXPECT_TRUE(is_conical(m));
    EXPECT_EQ(names(m, atoms(m)), (std::vector<std::string>{"u", "v"}));
    const auto ref = check_refinement(m);
    EXPECT_FALSE(ref.refinement);
    ASSERT_TRUE(ref.counterexample.has_value());
    const auto [a, b, c, d] = *ref.counterexample;
    EXPECT_EQ(m.add(a, b), m.add(c, d));
    EXPECT_FALSE(refinement_holds_for(m, a, b, c, d).has_value());
    const auto u = *m.find_label("u");
    const auto v = *m.find_label("v");
    EXPECT_EQ(m.add(u, u), m.add(u, m.add(v, v)));
    EXPECT_FALSE(refinement_holds_for(m, u, u, u, m.add(v, v)).has_value());
}

TEST(WeightedMonoid, RoseIsMnk) {
    for (std::size_t n = 1; n <= 4; ++n)
        for (std::size_t k = 1; k <= 4; ++k) {
            const auto m = enumerate_weighted_monoid(make_rose(n, n + k), MonoidVariant::NoSinkRelations);
            EXPECT_TRUE(monoid_isomorphic(m, make_Mnk(n, k)).has_value()) << n << "," << k;
        }
}

TEST(WeightedMonoid, CompleteTriangle) {
    const auto m = enumerate_weighted_monoid(make_complete_triangle(), MonoidVariant::NoSinkRelations);
    EXPECT_EQ(m.size(), 5u);
    EXPECT_EQ(group_completion(m), invariants_from_moduli({2, 2}));
    EXPECT_EQ(group_completion(m).to_string(), "Z2 x Z2");
    EXPECT_FALSE(classify_cyclic_sum(m).has_value());
}

TEST(WeightedMonoid, SinkVariants) {
    const auto g = make_G_nk(2, 3).graph();
    const auto with = enumerate_weighted_monoid(g, MonoidVariant::WithSinkRelations);
    EXPECT_TRUE(monoid_isomorphic(with, make_Mnk(2, 3)).has_value());
    EXPECT_THROW(enumerate_weighted_monoid(g, MonoidVariant::NoSinkRelations, {50, kDefaultBudget}), Inconclusive);
}

TEST(WeightedMonoid, CapIsInconclusive) {
    try {
        enumerate_weighted_monoid(make_triangle_sandpile().graph(), MonoidVariant::WithSinkRelations, {10, kDefaultBudget});
        ADD_FAILURE() << "cap ignored";
    } catch (const Inconclusive& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Inconclusive);
        EXPECT_FALSE(e.partial_elements().empty());
    }
}

TEST(WeightedMonoid, AgreesWithSandpileEnumeration) {
    for (const auto& e : sandk::testing::make_corpus(15)) {
        const auto sp = enumerate_sandpile_monoid(e.graph);
        if (sp.size() > 200) continue;
        const auto m = enumerate_weighted_monoid(e.graph.graph(), MonoidVariant::WithSinkRelations);
        EXPECT_TRUE(monoid_isomorphic(sp, m).has_value()) << e.name;
    }
}

TEST(Units, Examples) {
    EXPECT_EQ(units(make_Mnk(3, 2)), (std::vector<ElementIndex>{0}));
    for (std::size_t p : {2u, 3u, 5u, 7u}) {
        const auto sp = enumerate_sandpile_monoid(make_two_vertex_sandpile(0, p));
        EXPECT_TRUE(is_group(sp));
        EXPECT_TRUE(monoid_isomorphic(sp, make_Zn(p)).has_value());
    }
    EXPECT_EQ(units(make_Zn(1)).size(), 1u);
}

TEST(Atoms, Mnk) {
    // x is the only atom: for n >= 3, 2x = x + x is a proper decomposition.
    for (std::size_t n = 1; n <= 4; ++n)
        for (std::size_t k = 1; k <= 3; ++k) {
            const auto m = make_Mnk(n, k);
            EXPECT_EQ(atoms(m), brute_atoms(m));
            if (n == 1)
                EXPECT_TRUE(atoms(m).empty());
            else
                EXPECT_EQ(names(m, atoms(m)), (std::vector<std::string>{"x"}));
            EXPECT_EQ(is_refinement(m), n == 1) << n << "," << k;
        }
}

TEST(Refinement, MatchesBruteForce) {
    std::vector<FiniteCommMonoid> ms;
    for (std::size_t n = 1; n <= 3; ++n)
        for (std::size_t k = 1; k <= 3; ++k) ms.push_back(make_Mnk(n, k));
    ms.push_back(direct_sum(make_Cn(2), make_Cn(3)));
    ms.push_back(direct_sum(make_Mnk(2, 1), make_Cn(2)));
    ms.push_back(make_Zn(6));
    ms.push_back(enumerate_weighted_monoid(make_nonstabilizing_pair(), MonoidVariant::NoSinkRelations));
    ms.push_back(enumerate_sandpile_monoid(make_cycle_companion_G({2, 2, 1})));
    for (const auto& m : ms) {
        const auto r = check_refinement(m);
        EXPECT_EQ(r.refinement, brute_refinement(m)) << m.size();
        EXPECT_EQ(r.refinement, !r.counterexample.has_value());
        EXPECT_TRUE(!r.refinement || is_atom_cancellative(m));
    }
}

TEST(Refinement, Mnk2Counterexample) {
    for (std::size_t k = 1; k <= 4; ++k) {
        const auto m = make_Mnk(2, k);
        const ElementIndex x = 1;
        const ElementIndex last = 2 + k - 1;
        // x + (n-1)x = x + (n+k-1)x in M_{2,2+k}.
        EXPECT_EQ(m.add(x, 1), m.add(x, last));
        EXPECT_FALSE(refinement_holds_for(m, x, 1, x, last).has_value());
    }
}

TEST(SmallestIdeal, Mnk) {
    for (std::size_t n = 1; n <= 5; ++n)
        for (std::size_t k = 1; k <= 5; ++k) {
            const auto m = make_Mnk(n, k);
            const auto ideal = smallest_ideal(m);
            std::vector<ElementIndex> expect(k);
            std::iota(expect.begin(), expect.end(), n);
            EXPECT_EQ(ideal.elements, expect);
            std::size_t t = n;
            while (t % k != 0) ++t;
            EXPECT_EQ(ideal.identity, t);
            EXPECT_EQ(group_invariants_by_orders(ideal.group), invariants_from_moduli({BigInt(k)}));
        }
}

TEST(SmallestIdeal, EqualsHOnCorpus) {
    for (const auto& e : sandk::testing::make_corpus(40)) {
        const auto sp = enumerate_sandpile_monoid(e.graph);
        const auto ideal = smallest_ideal(sp);
        EXPECT_EQ(ideal.elements, brute_h(sp)) << e.name;
        EXPECT_EQ(sorted_orders(ideal.group).size(), ideal.elements.size());
        for (ElementIndex m = 0; m < sp.size(); ++m) {
            const auto zm = sp.add(ideal.identity, m);
            EXPECT_TRUE(std::binary_search(ideal.elements.begin(), ideal.elements.end(), zm)) << e.name;
        }
    }
}

TEST(SmallestIdeal, GroupIsWhole) {
    const auto z = make_Zn(6);
    const auto ideal = smallest_ideal(z);
    EXPECT_EQ(ideal.elements.size(), 6u);
    EXPECT_EQ(ideal.identity, z.zero());
}

TEST(GroupCompletion, Examples) {
    for (std::size_t k = 1; k <= 6; ++k)
        EXPECT_EQ(group_completion(make_Cn(k + 1)), invariants_from_moduli({BigInt(k)}));
    EXPECT_TRUE(group_completion(make_Zn(1)).is_trivial());
    const auto t = enumerate_sandpile_monoid(make_triangle_sandpile());
    const auto g = smallest_ideal(t).group;
    EXPECT_EQ(g.size(), 8u);
    EXPECT_EQ(group_invariants_by_orders(g).to_string(), "Z8");
    EXPECT_EQ(group_invariants_by_relations(g).to_string(), "Z8");
}

TEST(GroupCompletion, RoutesAgree) {
    for (auto moduli : std::vector<std::vector<std::size_t>>{{2, 2}, {2, 4}, {3, 6}, {2, 2, 2}, {4, 6}, {12}}) {
        FiniteCommMonoid g = make_Zn(moduli[0]);
        for (std::size_t i = 1; i < moduli.size(); ++i) g = direct_sum(g, make_Zn(moduli[i]));
        std::vector<BigInt> big(moduli.begin(), moduli.end());
        EXPECT_EQ(group_invariants_by_orders(g), invariants_from_moduli(big));
        EXPECT_EQ(group_invariants_by_relations(g), invariants_from_moduli(big));
    }
}

TEST(Quotient, Examples) {
    const auto m = make_Mnk(2, 3);
    EXPECT_TRUE(monoid_isomorphic(quotient_by_submonoid(m, {0}), m).has_value());
    std::vector<ElementIndex> all(m.size());
    std::iota(all.begin(), all.end(), 0);
    EXPECT_EQ(quotient_by_submonoid(m, all).size(), 1u);
    EXPECT_EQ(kind_of([&] { quotient_by_submonoid(m, {1}); }), ErrorKind::NotSubmonoid);
    EXPECT_EQ(kind_of([&] { quotient_by_submonoid(m, {0, 1}); }), ErrorKind::NotSubmonoid);

    const auto sp = enumerate_sandpile_monoid(make_two_vertex_sandpile(1, 2));
    const auto q = quotient_by_submonoid(direct_sum(sp, make_Zn(3)), {0, 1, 2});
    EXPECT_TRUE(monoid_isomorphic(q, sp).has_value());
}

TEST(Isomorphism, Examples) {
    const auto sp = enumerate_sandpile_monoid(make_G_nk(2, 3));
    const auto iso = monoid_isomorphic(sp, make_Mnk(2, 3));
    ASSERT_TRUE(iso.has_value());
    EXPECT_EQ((*iso)[sp.zero()], 0u);
    EXPECT_FALSE(monoid_isomorphic(make_Cn(4), make_Zn(4)).has_value());
    const auto id = monoid_isomorphic(sp, sp);
    ASSERT_TRUE(id.has_value());
    EXPECT_FALSE(monoid_isomorphic(make_Mnk(2, 3), make_Mnk(3, 2)).has_value());
    EXPECT_FALSE(monoid_isomorphic(make_Zn(4), direct_sum(make_Zn(2), make_Zn(2))).has_value());
    EXPECT_EQ(kind_of([] { monoid_isomorphic(make_Zn(30), make_Zn(30), 20); }), ErrorKind::SizeOverBudget);
}

TEST(Isomorphism, RelabelledTables) {
    // Permute the elements of a direct sum and recover an isomorphism.
    const auto m = direct_sum(direct_sum(make_Cn(2), make_Cn(3)), make_Mnk(2, 2));
    const std::size_t n = m.size();
    std::vector<ElementIndex> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937_64 rng(9);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<ElementIndex> inv(n);
    for (std::size_t i = 0; i < n; ++i) inv[perm[i]] = i;
    std::vector<std::string> labels(n);
    std::vector<ElementIndex> table(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        labels[perm[i]] = "e" + std::to_string(i);
        for (std::size_t j = 0; j < n; ++j) table[perm[i] * n + perm[j]] = perm[m.add(i, j)];
    }
    const FiniteCommMonoid shuffled(labels, perm[m.zero()], table);
    const auto iso = monoid_isomorphic(m, shuffled);
    ASSERT_TRUE(iso.has_value());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) EXPECT_EQ((*iso)[m.add(i, j)], shuffled.add((*iso)[i], (*iso)[j]));
}

TEST(Classify, Examples) {
    const auto c4 = enumerate_sandpile_monoid(make_cycle_companion_G({2, 2, 1}));
    EXPECT_EQ(classify_cyclic_sum(c4), (std::vector<std::size_t>{4}));
    EXPECT_FALSE(classify_cyclic_sum(make_Mnk(2, 3)).has_value());
    EXPECT_EQ(classify_cyclic_sum(direct_sum(make_Cn(2), make_Cn(3))), (std::vector<std::size_t>{2, 3}));
    EXPECT_EQ(classify_cyclic_sum(make_Zn(1)), std::vector<std::size_t>{});
    EXPECT_FALSE(classify_cyclic_sum(make_Zn(3)).has_value());
    EXPECT_EQ(classify_cyclic_sum(direct_sum(direct_sum(make_Cn(2), make_Cn(2)), make_Cn(4))),
              (std::vector<std::size_t>{2, 2, 4}));
}

TEST(Constructors, Examples) {
    const auto c4 = make_Mnk(1, 3);
    EXPECT_EQ(c4.labels(), (std::vector<std::string>{"0", "x", "2x", "3x"}));
    EXPECT_EQ(c4.add(1, 3), 1u);
    const auto c2 = make_Cn(2);
    EXPECT_EQ(c2.add(1, 1), 1u);
    EXPECT_EQ(direct_sum(c2, c2).size(), 4u);
    EXPECT_EQ(kind_of([] { make_Mnk(0, 1); }), ErrorKind::BadParameters);
    EXPECT_EQ(kind_of([] { make_Mnk(1, 0); }), ErrorKind::BadParameters);
    EXPECT_EQ(kind_of([] { make_Cn(1); }), ErrorKind::BadParameters);
}
