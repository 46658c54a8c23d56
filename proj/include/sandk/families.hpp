#pragma once

#include <numeric>
#include <string>
#include <vector>

#include "sandk/graph.hpp"

namespace sandk {

/// Two vertices: `x` with n loops and k parallel edges to the sink `s`.
inline SandpileGraph make_G_nk(std::size_t n, std::size_t k) {
    if (n < 1 || k < 1) detail::fail(ErrorKind::BadParameters, "make_G_nk needs n >= 1 and k >= 1");
    WeightedDigraph g;
    const auto x = g.add_vertex("x");
    const auto s = g.add_vertex("s");
    g.add_edges(x, x, n);
    g.add_edges(x, s, k);
    return validate_sandpile(g);
}

/// Same shape as G_{n,k} but with n allowed to be zero (all edges to the sink).
inline SandpileGraph make_two_vertex_sandpile(std::size_t loops, std::size_t sink_edges) {
    if (sink_edges < 1) detail::fail(ErrorKind::BadParameters, "need at least one edge to the sink");
    WeightedDigraph g;
    const auto x = g.add_vertex("x");
    const auto s = g.add_vertex("s");
    g.add_edges(x, x, loops);
    g.add_edges(x, s, sink_edges);
    return validate_sandpile(g);
}

/// One vertex `v` with n loops, each of the given weight.  E_{n,n+k} is
/// make_rose(n, n + k).
inline WeightedDigraph make_rose(std::size_t n, Weight weight) {
    if (n < 1 || weight < 1) detail::fail(ErrorKind::BadParameters, "make_rose needs n >= 1 and weight >= 1");
    WeightedDigraph g;
    const auto v = g.add_vertex("v");
    g.add_edges(v, v, n, weight);
    return g;
}

namespace detail {

inline void check_cycle_weights(const std::vector<Weight>& weights) {
    if (weights.empty()) fail(ErrorKind::BadParameters, "weighted cycle needs at least one vertex");
    for (Weight w : weights)
        if (w < 1) fail(ErrorKind::BadParameters, "cycle weights must be positive");
    if (std::all_of(weights.begin(), weights.end(), [](Weight w) { return w == 1; }))
        fail(ErrorKind::BadParameters, "some cycle weight must be at least 2 (all-ones gives an infinite monoid)");
}

inline std::string cycle_vertex(std::size_t i) { return "v" + std::to_string(i + 1); }

}  // namespace detail

/// v1 -> v2 -> ... -> vm -> v1, the edge out of v_i carrying weight w_i.
inline WeightedDigraph make_weighted_cycle(const std::vector<Weight>& weights) {
    detail::check_cycle_weights(weights);
    WeightedDigraph g;
    const std::size_t m = weights.size();
    for (std::size_t i = 0; i < m; ++i) g.add_vertex(detail::cycle_vertex(i));
    for (std::size_t i = 0; i < m; ++i) g.add_edge(i, (i + 1) % m, weights[i]);
    return g;
}

/// The unweighted companion of a weighted cycle: every weight-w edge is
/// replaced by w parallel unit edges and then all edges are reversed.
inline WeightedDigraph make_cycle_companion_F(const std::vector<Weight>& weights) {
    detail::check_cycle_weights(weights);
    WeightedDigraph g;
    const std::size_t m = weights.size();
    for (std::size_t i = 0; i < m; ++i) g.add_vertex(detail::cycle_vertex(i));
    for (std::size_t i = 0; i < m; ++i) g.add_edges((i + 1) % m, i, weights[i]);
    return g;
}

/// The sandpile companion of a weighted cycle: v_i keeps its cycle edge and
/// sends w_i - 1 further edges to a new sink `s`.
inline SandpileGraph make_cycle_companion_G(const std::vector<Weight>& weights) {
    detail::check_cycle_weights(weights);
    WeightedDigraph g;
    const std::size_t m = weights.size();
    for (std::size_t i = 0; i < m; ++i) g.add_vertex(detail::cycle_vertex(i));
    const auto s = g.add_vertex("s");
    for (std::size_t i = 0; i < m; ++i) {
        g.add_edge(i, (i + 1) % m);
        g.add_edges(i, s, weights[i] - 1);
    }
    return validate_sandpile(g);
}

/// Disjoint union of oriented cycles over a common sink.  Each inner list
/// gives the out-degrees of one cycle's vertices c<j>v1..c<j>vt; vertex v_i
/// sends one edge to v_{i-1} (v_1 to v_t) and the rest of its edges to `s`.
inline SandpileGraph make_refinement_graph(const std::vector<std::vector<std::size_t>>& classes) {
    WeightedDigraph g;
    std::vector<std::vector<VertexIndex>> ids;
    for (std::size_t j = 0; j < classes.size(); ++j) {
        const auto& degrees = classes[j];
        if (degrees.empty()) detail::fail(ErrorKind::BadParameters, "empty cycle class");
        if (std::any_of(degrees.begin(), degrees.end(), [](std::size_t d) { return d < 1; }))
            detail::fail(ErrorKind::BadParameters, "out-degrees must be positive");
        if (std::all_of(degrees.begin(), degrees.end(), [](std::size_t d) { return d == 1; }))
            detail::fail(ErrorKind::BadParameters, "every cycle class needs an edge to the sink");
        auto& cls = ids.emplace_back();
        for (std::size_t i = 0; i < degrees.size(); ++i)
            cls.push_back(g.add_vertex("c" + std::to_string(j + 1) + "v" + std::to_string(i + 1)));
    }
    const auto s = g.add_vertex("s");
    for (std::size_t j = 0; j < classes.size(); ++j) {
        const auto& cls = ids[j];
        const std::size_t t = cls.size();
        for (std::size_t i = 0; i < t; ++i) {
            g.add_edge(cls[i], cls[(i + t - 1) % t]);
            g.add_edges(cls[i], s, classes[j][i] - 1);
        }
    }
    return validate_sandpile(g);
}

/// Two vertices u, v with w(u) = w(v) = 2: u has a loop and two edges to v,
/// v has a loop and one edge to u.  The element 2u never stabilises here.
inline WeightedDigraph make_nonstabilizing_pair() {
    WeightedDigraph g;
    const auto u = g.add_vertex("u");
    const auto v = g.add_vertex("v");
    g.add_edge(u, u, 2);
    g.add_edges(u, v, 2, 2);
    g.add_edge(v, u, 2);
    g.add_edge(v, v, 2);
    return g;
}

/// Triangle u, v, z: u -> v, u -> z; v and z each carry a loop and an edge
/// back to u.  Every edge gets the given weight.
inline WeightedDigraph make_loop_triangle(Weight weight) {
    WeightedDigraph g;
    const auto u = g.add_vertex("u");
    const auto v = g.add_vertex("v");
    const auto z = g.add_vertex("z");
    g.add_edge(u, v, weight);
    g.add_edge(u, z, weight);
    g.add_edge(v, u, weight);
    g.add_edge(v, v, weight);
    g.add_edge(z, u, weight);
    g.add_edge(z, z, weight);
    return g;
}

/// The loop triangle with one extra edge from each of u, v, z to a sink `s`.
inline SandpileGraph make_triangle_sandpile() {
    WeightedDigraph g;
    const auto u = g.add_vertex("u");
    const auto v = g.add_vertex("v");
    const auto z = g.add_vertex("z");
    const auto s = g.add_vertex("s");
    g.add_edge(u, v);
    g.add_edge(u, z);
    g.add_edge(u, s);
    g.add_edge(v, v);
    g.add_edge(v, u);
    g.add_edge(v, s);
    g.add_edge(z, z);
    g.add_edge(z, u);
    g.add_edge(z, s);
    return validate_sandpile(g);
}

/// Complete digraph on v1, v2, v3 without loops (unit weights).
inline WeightedDigraph make_complete_triangle() {
    WeightedDigraph g;
    for (std::size_t i = 0; i < 3; ++i) g.add_vertex(detail::cycle_vertex(i));
    for (VertexIndex a = 0; a < 3; ++a)
        for (VertexIndex b = 0; b < 3; ++b)
            if (a != b) g.add_edge(a, b);
    return g;
}

}  // namespace sandk
