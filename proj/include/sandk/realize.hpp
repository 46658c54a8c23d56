#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "sandk/families.hpp"
#include "sandk/graph.hpp"
#include "sandk/ktheory.hpp"
#include "sandk/monoid.hpp"

namespace sandk {

struct ConicalityReport {
    bool conical = true;
    /// Non-sink vertices of S emitting more than one edge.
    VertexSet witnesses;
};

inline ConicalityReport conicality_report(const SandpileGraph& sg) {
    ConicalityReport r;
    r.witnesses = conicality_witnesses(sg);
    r.conical = r.witnesses.empty();
    return r;
}

/// One checked statement and whether it held.
struct Claim {
    std::string name;
    bool holds = false;
    std::string detail;
};

struct RealizationReport {
    VertexSet s;
    WeightedDigraph quotient;
    bool conical = true;
    VertexSet conicality_witnesses;
    FiniteCommMonoid sp;
    FiniteCommMonoid weighted;
    /// Conical case: SP -> M_(E/S,w_r).  Otherwise SP/Z(SP) -> M_(E/S,w_r).
    std::optional<std::vector<ElementIndex>> isomorphism;
    std::vector<ElementIndex> units;
    AbelianGroupInvariants sandpile_group;
    AbelianGroupInvariants k0;
    std::vector<Claim> claims;

    bool ok() const {
        return std::all_of(claims.begin(), claims.end(), [](const Claim& c) { return c.holds; });
    }
};

/// Builds (E/S, w_r), enumerates SP(E) and M_(E/S,w_r), and checks
///  conical:     SP(E) ~= M_(E/S,w_r) and G(E) ~= K_0(E/S,w_r);
///  non-conical: SP(E)/Z(SP(E)) ~= M_(E/S,w_r).
inline RealizationReport realization(const SandpileGraph& sg, std::size_t sandpile_cap = kDefaultSandpileCap,
                                     EnumerationCaps caps = {}, std::size_t iso_cap = kDefaultIsomorphismCap) {
    const WeightedDigraph& g = sg.graph();
    const VertexSet s = non_cycle_vertices(g);
    detail::ensure(is_hereditary_saturated(g, s), "S is not hereditary and saturated");
    WeightedDigraph quotient = quotient_graph(g, s);
    for (VertexIndex v = 0; v < quotient.vertex_count(); ++v)
        detail::ensure(!quotient.is_sink(v), "E/S has a sink");

    auto sp = enumerate_sandpile_monoid(sg, sandpile_cap);
    auto weighted = enumerate_weighted_monoid(quotient, MonoidVariant::NoSinkRelations, caps);
    const auto conic = conicality_report(sg);
    auto us = units(sp);
    const bool monoid_conical = us.size() == 1;

    RealizationReport r{s,
                        std::move(quotient),
                        conic.conical,
                        conic.witnesses,
                        std::move(sp),
                        std::move(weighted),
                        std::nullopt,
                        std::move(us),
                        {},
                        {},
                        {}};
    r.sandpile_group = group_completion(r.sp);
    r.k0 = k0_of_weighted_graph(r.quotient);
    r.claims.push_back({"conical iff every non-sink vertex of S is irrelevant", monoid_conical == r.conical,
                        std::string("monoid ") + (monoid_conical ? "conical" : "not conical") + ", graph test " +
                            (r.conical ? "conical" : "not conical")});
    if (r.conical) {
        r.isomorphism = monoid_isomorphic(r.sp, r.weighted, iso_cap);
        r.claims.push_back({"SP(E) ~= M_(E/S,w_r)", r.isomorphism.has_value(),
                            "|SP| = " + std::to_string(r.sp.size()) + ", |M| = " + std::to_string(r.weighted.size())});
        r.claims.push_back({"G(E) ~= K_0(E/S,w_r)", r.sandpile_group == r.k0,
                            r.sandpile_group.to_string() + " vs " + r.k0.to_string()});
    } else {
        const auto reduced = quotient_by_submonoid(r.sp, r.units);
        r.isomorphism = monoid_isomorphic(reduced, r.weighted, iso_cap);
        r.claims.push_back({"SP(E)/Z(SP(E)) ~= M_(E/S,w_r)", r.isomorphism.has_value(),
                            "|SP/Z| = " + std::to_string(reduced.size()) +
                                ", |M| = " + std::to_string(r.weighted.size())});
    }
    return r;
}

/// A vertex u != sink whose edges are exactly one edge to v plus edges to
/// the sink (at least one), if any; the lowest index wins.
inline std::optional<VertexIndex> find_lemma_vertex(const SandpileGraph& sg, VertexIndex v) {
    const WeightedDigraph& g = sg.graph();
    for (VertexIndex u = 0; u < g.vertex_count(); ++u) {
        if (u == sg.sink() || g.out_degree(u) < 2) continue;
        std::size_t to_v = 0;
        std::size_t to_sink = 0;
        for (EdgeIndex e : g.out_edges(u)) {
            const VertexIndex r = g.edge(e).range;
            if (r == sg.sink())
                ++to_sink;
            else if (r == v)
                ++to_v;
        }
        if (v != sg.sink() && to_v == 1 && to_sink + 1 == g.out_degree(u)) return u;
    }
    return std::nullopt;
}

struct CycleClass {
    /// v1, ..., vt with the non-sink edge of v_i going to v_{i-1} (v1 to vt).
    std::vector<VertexIndex> cycle;
    /// Product of the out-degrees along the cycle; SP of the class is C_order.
    std::size_t order = 1;
};

struct RefinementOutcome {
    std::optional<std::vector<CycleClass>> classes;
    std::optional<std::array<ElementIndex, 4>> counterexample;
    FiniteCommMonoid sp;
};

/// For a reduced conical sandpile graph: the partition of the non-sink
/// vertices into oriented cycles when SP is refinement, otherwise a
/// refinement counterexample.
inline RefinementOutcome refinement_structure(const SandpileGraph& sg, std::size_t cap = kDefaultSandpileCap) {
    const WeightedDigraph& g = sg.graph();
    if (!is_reduced(g)) detail::fail(ErrorKind::NotReduced, "graph has irrelevant vertices");
    if (const auto w = conicality_witnesses(sg); !w.empty())
        detail::fail(ErrorKind::NotConical, "vertices of S that are not irrelevant: " + join_names(g, w));
    auto sp = enumerate_sandpile_monoid(sg, cap);
    const auto check = check_refinement(sp);
    if (!check.refinement) return RefinementOutcome{std::nullopt, check.counterexample, std::move(sp)};

    const std::size_t n = g.vertex_count();
    std::vector<std::optional<VertexIndex>> u_of(n);
    std::vector<bool> used(n, false);
    for (VertexIndex v = 0; v < n; ++v) {
        if (v == sg.sink()) continue;
        u_of[v] = find_lemma_vertex(sg, v);
        detail::ensure(u_of[v].has_value(), "no vertex u_v for " + g.name(v));
        detail::ensure(!used[*u_of[v]], "vertex serves as u_v twice");
        used[*u_of[v]] = true;
    }
    std::vector<CycleClass> classes;
    std::vector<bool> placed(n, false);
    for (VertexIndex v = 0; v < n; ++v) {
        if (v == sg.sink() || placed[v]) continue;
        CycleClass cls;
        for (VertexIndex x = v; !placed[x]; x = *u_of[x]) {
            placed[x] = true;
            cls.cycle.push_back(x);
            cls.order *= g.out_degree(x);
        }
        detail::ensure(cls.cycle.front() == *u_of[cls.cycle.back()], "u_v chain does not close into a cycle");
        classes.push_back(std::move(cls));
    }
    // G is exactly {s} together with the cycles: every vertex has one
    // non-sink edge, to its predecessor on its cycle, and nothing else.
    for (const auto& cls : classes) {
        const std::size_t t = cls.cycle.size();
        for (std::size_t i = 0; i < t; ++i) {
            const VertexIndex vi = cls.cycle[i];
            const VertexIndex prev = cls.cycle[(i + t - 1) % t];
            std::size_t off_sink = 0;
            for (EdgeIndex e : g.out_edges(vi)) {
                const VertexIndex r = g.edge(e).range;
                if (r == sg.sink()) continue;
                ++off_sink;
                detail::ensure(r == prev, "edge leaves its cycle class");
            }
            detail::ensure(off_sink == 1, "vertex does not emit exactly one cycle edge");
        }
    }
    return RefinementOutcome{std::move(classes), std::nullopt, std::move(sp)};
}

struct PrimeClassification {
    enum class Kind { ZpCase, MCase, NotPrimeOrder };
    Kind kind = Kind::NotPrimeOrder;
    std::size_t p = 0;
    /// MCase(n, p): SP ~= M_{n,p}; n = p - l with l edges to the sink.
    std::size_t n = 0;
    std::size_t order = 0;
    bool verified = false;
};

inline std::string_view prime_kind_name(PrimeClassification::Kind k) {
    switch (k) {
    case PrimeClassification::Kind::ZpCase: return "ZpCase";
    case PrimeClassification::Kind::MCase: return "MCase";
    case PrimeClassification::Kind::NotPrimeOrder: return "NotPrimeOrder";
    }
    return "?";
}

/// |SP| prime forces one non-sink vertex x with p edges; ZpCase when all of
/// them go to the sink, otherwise MCase(p - l, p) with l sink edges.
inline PrimeClassification prime_classifier(const SandpileGraph& sg) {
    const WeightedDigraph& g = sg.graph();
    if (!is_reduced(g)) detail::fail(ErrorKind::NotReduced, "graph has irrelevant vertices");
    std::size_t order = 1;
    for (VertexIndex v = 0; v < g.vertex_count(); ++v)
        if (v != sg.sink()) order = detail::checked_mul(order, g.out_degree(v));
    PrimeClassification out;
    out.order = order;
    const auto ps = detail::prime_factors(order);
    if (order < 2 || ps.size() != 1 || ps.front() != order) return out;
    detail::ensure(g.vertex_count() == 2, "prime order with more than one non-sink vertex");
    const VertexIndex x = sg.sink() == 0 ? 1 : 0;
    const std::size_t loops = g.loop_count(x);
    out.p = order;
    const auto sp = enumerate_sandpile_monoid(sg);
    if (loops == 0) {
        out.kind = PrimeClassification::Kind::ZpCase;
        out.verified = monoid_isomorphic(sp, make_Zn(order)).has_value();
    } else {
        out.kind = PrimeClassification::Kind::MCase;
        out.n = loops;
        out.verified = monoid_isomorphic(sp, make_Mnk(loops, order - loops)).has_value();
    }
    return out;
}

struct WeightedCycleReport {
    std::vector<Weight> weights;
    std::size_t n = 0;
    std::size_t weighted_size = 0;
    std::size_t companion_f_size = 0;
    std::size_t sandpile_size = 0;
    bool weighted_iso = false;
    bool companion_f_iso = false;
    bool sandpile_iso = false;

    bool ok() const { return weighted_iso && companion_f_iso && sandpile_iso; }
};

/// M_(E,w), M_F and SP(G) for a weighted cycle, each compared with C_N,
/// N the product of the weights.
inline WeightedCycleReport weighted_cycle_suite(const std::vector<Weight>& weights, EnumerationCaps caps = {}) {
    const auto e = make_weighted_cycle(weights);
    const auto f = make_cycle_companion_F(weights);
    const auto g = make_cycle_companion_G(weights);
    WeightedCycleReport r;
    r.weights = weights;
    r.n = 1;
    for (Weight w : weights) r.n = detail::checked_mul(r.n, w);
    const auto cn = make_Cn(r.n);
    const auto me = enumerate_weighted_monoid(e, MonoidVariant::NoSinkRelations, caps);
    const auto mf = enumerate_weighted_monoid(f, MonoidVariant::NoSinkRelations, caps);
    const auto sp = enumerate_sandpile_monoid(g);
    r.weighted_size = me.size();
    r.companion_f_size = mf.size();
    r.sandpile_size = sp.size();
    r.weighted_iso = monoid_isomorphic(me, cn).has_value();
    r.companion_f_iso = monoid_isomorphic(mf, cn).has_value();
    r.sandpile_iso = monoid_isomorphic(sp, cn).has_value();
    return r;
}

}  // namespace sandk
