#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "sandk/sandk.hpp"

namespace sandk::cli {

using nlohmann::ordered_json;

inline ordered_json big_to_json(const BigInt& x) {
    if (x >= std::numeric_limits<std::int64_t>::min() && x <= std::numeric_limits<std::int64_t>::max())
        return static_cast<std::int64_t>(x);
    return x.str();
}

inline ordered_json invariants_json(const AbelianGroupInvariants& g) {
    ordered_json t = ordered_json::array();
    for (const auto& d : g.torsion) t.push_back(big_to_json(d));
    return {{"torsion", t}, {"free_rank", g.free_rank}, {"text", g.to_string()}};
}

inline ordered_json labels_json(const FiniteCommMonoid& m, const std::vector<ElementIndex>& xs) {
    ordered_json out = ordered_json::array();
    for (ElementIndex x : xs) out.push_back(m.label(x));
    return out;
}

inline ordered_json configuration_json(const WeightedDigraph& g, const Configuration& c) {
    ordered_json out = ordered_json::object();
    for (VertexIndex v = 0; v < g.vertex_count(); ++v) out[g.name(v)] = c[v];
    return out;
}

inline ordered_json trace_json(const WeightedDigraph& g, const StabilizationTrace& t) {
    ordered_json odo = ordered_json::object();
    for (VertexIndex v = 0; v < g.vertex_count(); ++v) odo[g.name(v)] = t.odometer[v];
    return {{"result", configuration_json(g, t.result)}, {"odometer", odo}, {"steps", t.steps}};
}

inline ordered_json matrix_json(const IntegerMatrix& m) {
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        ordered_json row = ordered_json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(big_to_json(m(i, j)));
        rows.push_back(row);
    }
    return rows;
}

inline ordered_json monoid_json(const FiniteCommMonoid& m, std::size_t iso_cap) {
    const auto ref = check_refinement(m);
    const auto ac = check_atom_cancellative(m);
    const auto ideal = smallest_ideal(m);
    ordered_json j;
    j["size"] = m.size();
    j["zero"] = m.label(m.zero());
    j["elements"] = m.labels();
    j["generators"] = labels_json(m, m.generators());
    j["atoms"] = labels_json(m, atoms(m));
    j["units"] = labels_json(m, units(m));
    j["conical"] = is_conical(m);
    j["refinement"] = ref.refinement;
    j["refinement_witness"] = ref.counterexample
                                  ? ordered_json(labels_json(m, {ref.counterexample->begin(), ref.counterexample->end()}))
                                  : ordered_json(nullptr);
    j["atom_cancellative"] = ac.atom_cancellative;
    j["smallest_ideal_size"] = ideal.elements.size();
    j["smallest_ideal_identity"] = m.label(ideal.identity);
    j["invariant_factors"] = invariants_json(group_invariants_by_orders(ideal.group));
    if (m.size() <= iso_cap) {
        const auto cs = classify_cyclic_sum(m, iso_cap);
        j["cyclic_sum"] = cs ? ordered_json(*cs) : ordered_json(nullptr);
    } else {
        j["cyclic_sum"] = nullptr;
    }
    return j;
}

inline ordered_json vertex_list(const WeightedDigraph& g, const VertexSet& vs) {
    ordered_json out = ordered_json::array();
    for (VertexIndex v : vs) out.push_back(g.name(v));
    return out;
}

inline ordered_json realization_json(const SandpileGraph& sg, const RealizationReport& r) {
    const WeightedDigraph& g = sg.graph();
    ordered_json claims = ordered_json::array();
    for (const auto& c : r.claims) claims.push_back({{"name", c.name}, {"holds", c.holds}, {"detail", c.detail}});
    ordered_json wr = ordered_json::object();
    for (VertexIndex v = 0; v < r.quotient.vertex_count(); ++v) wr[r.quotient.name(v)] = r.quotient.vertex_weight(v);
    ordered_json iso = nullptr;
    if (r.isomorphism) {
        iso = ordered_json::object();
        const std::vector<std::string> domain =
            r.conical ? r.sp.labels() : quotient_by_submonoid(r.sp, r.units).labels();
        for (std::size_t i = 0; i < r.isomorphism->size(); ++i)
            iso[domain[i]] = r.weighted.label((*r.isomorphism)[i]);
    }
    return {{"report", "realize"},
            {"s", vertex_list(g, r.s)},
            {"quotient", to_text(r.quotient)},
            {"quotient_weights", wr},
            {"conical", r.conical},
            {"conicality_witnesses", vertex_list(g, r.conicality_witnesses)},
            {"sp_size", r.sp.size()},
            {"weighted_size", r.weighted.size()},
            {"weighted_elements", r.weighted.labels()},
            {"units", labels_json(r.sp, r.units)},
            {"isomorphism", iso},
            {"sandpile_group", invariants_json(r.sandpile_group)},
            {"k0", invariants_json(r.k0)},
            {"claims", claims},
            {"ok", r.ok()}};
}

}  // namespace sandk::cli
