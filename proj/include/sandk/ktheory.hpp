#pragma once

#include <vector>

#include "sandk/graph.hpp"
#include "sandk/matrix.hpp"

namespace sandk {

/// n_ij = number of edges v_i -> v_j (weights are not multiplied in).
inline IntegerMatrix adjacency(const WeightedDigraph& g) {
    IntegerMatrix n(g.vertex_count(), g.vertex_count());
    for (const Edge& e : g.edges()) n(e.source, e.range) += 1;
    return n;
}

/// N^t - I_w with the sink columns removed: |E^0| rows, one column per
/// regular vertex (in vertex order).  Recorded vertex weights take
/// precedence over edge weights.
inline IntegerMatrix k0_matrix(const WeightedDigraph& g) {
    if (!g.is_vertex_weighted()) detail::fail(ErrorKind::NotVertexWeighted, "k0_matrix");
    const IntegerMatrix n = adjacency(g);
    std::vector<VertexIndex> regular;
    for (VertexIndex v = 0; v < g.vertex_count(); ++v)
        if (!g.is_sink(v)) regular.push_back(v);
    IntegerMatrix k(g.vertex_count(), regular.size());
    for (VertexIndex i = 0; i < g.vertex_count(); ++i)
        for (std::size_t c = 0; c < regular.size(); ++c) {
            const VertexIndex j = regular[c];
            k(i, c) = n(j, i);
            if (i == j) k(i, c) -= g.vertex_weight(j);
        }
    return k;
}

inline AbelianGroupInvariants k0_of_weighted_graph(const WeightedDigraph& g) { return cokernel(k0_matrix(g)); }

/// G(E) computed as K_0 of (E/S, w_r); defined for conical SP(E) only.
inline AbelianGroupInvariants sandpile_group_via_k0(const SandpileGraph& sg) {
    const auto witnesses = conicality_witnesses(sg);
    if (!witnesses.empty())
        detail::fail(ErrorKind::NotConical, "vertices of S that are not irrelevant: " + join_names(sg.graph(), witnesses));
    return k0_of_weighted_graph(quotient_graph(sg.graph(), non_cycle_vertices(sg.graph())));
}

}  // namespace sandk
