#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sandk/error.hpp"

namespace sandk {

using VertexIndex = std::size_t;
using EdgeIndex = std::size_t;
using Weight = std::uint64_t;

/// Sorted, duplicate-free list of vertex indices.
using VertexSet = std::vector<VertexIndex>;

struct Edge {
    EdgeIndex id = 0;
    VertexIndex source = 0;
    VertexIndex range = 0;
    Weight weight = 1;

    bool operator==(const Edge&) const = default;
};

inline bool valid_vertex_name(std::string_view name) {
    if (name.empty()) return false;
    return std::none_of(name.begin(), name.end(), [](char c) {
        return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
    });
}

/// Finite directed multigraph with positive edge weights.  Parallel edges and
/// loops are allowed; vertices and edges get dense indices in insertion order.
///
/// A vertex may additionally carry an explicit weight that overrides the
/// edge-derived one.  Quotient graphs use this to remember the weight a vertex
/// had in its parent graph.
class WeightedDigraph {
public:
    VertexIndex add_vertex(std::string name) {
        if (!valid_vertex_name(name))
            detail::fail(ErrorKind::BadParameters, "invalid vertex name '" + name + "'");
        if (index_.count(name))
            detail::fail(ErrorKind::BadParameters, "duplicate vertex '" + name + "'");
        const VertexIndex v = names_.size();
        index_.emplace(name, v);
        names_.push_back(std::move(name));
        out_.emplace_back();
        weight_override_.emplace_back();
        return v;
    }

    EdgeIndex add_edge(VertexIndex source, VertexIndex range, Weight weight = 1) {
        check_vertex(source);
        check_vertex(range);
        if (weight == 0) detail::fail(ErrorKind::BadParameters, "edge weight must be positive");
        const EdgeIndex id = edges_.size();
        edges_.push_back(Edge{id, source, range, weight});
        out_[source].push_back(id);
        return id;
    }

    EdgeIndex add_edge(std::string_view source, std::string_view range, Weight weight = 1) {
        return add_edge(index_of(source), index_of(range), weight);
    }

    void add_edges(VertexIndex source, VertexIndex range, std::size_t count, Weight weight = 1) {
        for (std::size_t i = 0; i < count; ++i) add_edge(source, range, weight);
    }

    void set_vertex_weight(VertexIndex v, Weight weight) {
        check_vertex(v);
        if (weight == 0) detail::fail(ErrorKind::BadParameters, "vertex weight must be positive");
        weight_override_[v] = weight;
    }

    std::size_t vertex_count() const noexcept { return names_.size(); }
    std::size_t edge_count() const noexcept { return edges_.size(); }

    const std::string& name(VertexIndex v) const {
        check_vertex(v);
        return names_[v];
    }

    std::optional<VertexIndex> find(std::string_view name) const {
        auto it = index_.find(name);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    VertexIndex index_of(std::string_view name) const {
        if (auto v = find(name)) return *v;
        detail::fail(ErrorKind::UnknownVertex, "no vertex named '" + std::string(name) + "'");
    }

    const Edge& edge(EdgeIndex e) const { return edges_.at(e); }
    std::span<const Edge> edges() const noexcept { return edges_; }

    std::span<const EdgeIndex> out_edges(VertexIndex v) const {
        check_vertex(v);
        return out_[v];
    }

    std::size_t out_degree(VertexIndex v) const { return out_edges(v).size(); }

    std::size_t loop_count(VertexIndex v) const {
        return static_cast<std::size_t>(std::count_if(out_[v].begin(), out_[v].end(),
                                                      [&](EdgeIndex e) { return edges_[e].range == v; }));
    }

    bool is_sink(VertexIndex v) const { return out_degree(v) == 0; }

    VertexSet sinks() const {
        VertexSet result;
        for (VertexIndex v = 0; v < vertex_count(); ++v)
            if (is_sink(v)) result.push_back(v);
        return result;
    }

    std::optional<Weight> weight_override(VertexIndex v) const {
        check_vertex(v);
        return weight_override_[v];
    }

    /// w(v): the explicit weight when one is recorded, otherwise the maximum
    /// weight over the edges v emits.  Sinks have weight 1.
    Weight vertex_weight(VertexIndex v) const {
        check_vertex(v);
        if (weight_override_[v]) return *weight_override_[v];
        Weight w = 0;
        for (EdgeIndex e : out_[v]) w = std::max(w, edges_[e].weight);
        return w == 0 ? 1 : w;
    }

    bool is_vertex_weighted() const {
        for (VertexIndex v = 0; v < vertex_count(); ++v) {
            const auto out = out_[v];
            for (EdgeIndex e : out)
                if (edges_[e].weight != edges_[out.front()].weight) return false;
        }
        return true;
    }

    bool is_balanced() const {
        if (!is_vertex_weighted()) return false;
        for (VertexIndex v = 0; v < vertex_count(); ++v)
            if (!is_sink(v) && vertex_weight(v) != out_degree(v)) return false;
        return true;
    }

    bool operator==(const WeightedDigraph& other) const {
        return names_ == other.names_ && edges_ == other.edges_ &&
               weight_override_ == other.weight_override_;
    }

private:
    void check_vertex(VertexIndex v) const {
        if (v >= names_.size())
            detail::fail(ErrorKind::UnknownVertex, "vertex index " + std::to_string(v) + " out of range");
    }

    std::vector<std::string> names_;
    std::map<std::string, VertexIndex, std::less<>> index_;
    std::vector<Edge> edges_;
    std::vector<std::vector<EdgeIndex>> out_;
    std::vector<std::optional<Weight>> weight_override_;
};

/// A validated sandpile graph: one sink, reachable from every vertex, with the
/// balanced weighting w(v) = out-degree imposed on every edge.
class SandpileGraph {
public:
    const WeightedDigraph& graph() const noexcept { return graph_; }
    VertexIndex sink() const noexcept { return sink_; }
    std::size_t vertex_count() const noexcept { return graph_.vertex_count(); }
    const std::string& name(VertexIndex v) const { return graph_.name(v); }

    bool operator==(const SandpileGraph&) const = default;

private:
    SandpileGraph(WeightedDigraph g, VertexIndex sink) : graph_(std::move(g)), sink_(sink) {}

    friend SandpileGraph validate_sandpile(const WeightedDigraph&, std::optional<std::string_view>);

    WeightedDigraph graph_;
    VertexIndex sink_;
};

inline std::string join_names(const WeightedDigraph& g, const VertexSet& vs) {
    std::string out;
    for (VertexIndex v : vs) {
        if (!out.empty()) out += ", ";
        out += g.name(v);
    }
    return out;
}

/// Vertices from which `target` can be reached by a directed path (including
/// `target` itself).
inline std::vector<bool> reaches(const WeightedDigraph& g, VertexIndex target) {
    std::vector<std::vector<VertexIndex>> incoming(g.vertex_count());
    for (const Edge& e : g.edges()) incoming[e.range].push_back(e.source);
    std::vector<bool> seen(g.vertex_count(), false);
    std::deque<VertexIndex> queue{target};
    seen[target] = true;
    while (!queue.empty()) {
        const VertexIndex v = queue.front();
        queue.pop_front();
        for (VertexIndex u : incoming[v])
            if (!seen[u]) {
                seen[u] = true;
                queue.push_back(u);
            }
    }
    return seen;
}

inline SandpileGraph validate_sandpile(const WeightedDigraph& g,
                                       std::optional<std::string_view> sink_hint = std::nullopt) {
    const VertexSet sinks = g.sinks();
    if (sinks.empty()) detail::fail(ErrorKind::NoSink, "graph has no vertex emitting zero edges");
    if (sinks.size() > 1)
        detail::fail(ErrorKind::MultipleSinks, "sinks: " + join_names(g, sinks));
    const VertexIndex sink = sinks.front();
    if (sink_hint) {
        const VertexIndex hinted = g.index_of(*sink_hint);
        if (hinted != sink)
            detail::fail(ErrorKind::SinkHintMismatch,
                         "hint names '" + g.name(hinted) + "' but the sink is '" + g.name(sink) + "'");
    }
    const auto ok = reaches(g, sink);
    VertexSet unreachable;
    for (VertexIndex v = 0; v < g.vertex_count(); ++v)
        if (!ok[v]) unreachable.push_back(v);
    if (!unreachable.empty())
        detail::fail(ErrorKind::UnreachableSink, "no path to the sink from: " + join_names(g, unreachable));

    WeightedDigraph balanced;
    for (VertexIndex v = 0; v < g.vertex_count(); ++v) balanced.add_vertex(g.name(v));
    for (const Edge& e : g.edges()) balanced.add_edge(e.source, e.range, g.out_degree(e.source));
    return SandpileGraph(std::move(balanced), sink);
}

/// Contracts irrelevant vertices (out-degree exactly one) until none remain.
/// The lowest-index irrelevant vertex goes first; edges into it are
/// redirected to the range of its single edge.
inline SandpileGraph reduce_graph(const SandpileGraph& sg) {
    WeightedDigraph g = sg.graph();
    for (;;) {
        std::optional<VertexIndex> victim;
        for (VertexIndex v = 0; v < g.vertex_count(); ++v)
            if (g.out_degree(v) == 1) {
                victim = v;
                break;
            }
        if (!victim) break;
        const VertexIndex v = *victim;
        const VertexIndex target = g.edge(g.out_edges(v).front()).range;
        detail::ensure(target != v, "irrelevant vertex with a self-loop in a sandpile graph");

        WeightedDigraph next;
        std::vector<VertexIndex> remap(g.vertex_count());
        for (VertexIndex u = 0; u < g.vertex_count(); ++u)
            if (u != v) remap[u] = next.add_vertex(g.name(u));
        remap[v] = remap[target];
        for (const Edge& e : g.edges())
            if (e.source != v) next.add_edge(remap[e.source], remap[e.range], e.weight);
        g = std::move(next);
    }
    return validate_sandpile(g);
}

inline bool is_reduced(const WeightedDigraph& g) {
    for (VertexIndex v = 0; v < g.vertex_count(); ++v)
        if (g.out_degree(v) == 1) return false;
    return true;
}

/// S: the vertices from which no cycle (loops included) can be reached.
inline VertexSet non_cycle_vertices(const WeightedDigraph& g) {
    std::vector<bool> in_s(g.vertex_count(), false);
    bool changed = true;
    while (changed) {
        changed = false;
        for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
            if (in_s[v]) continue;
            const auto out = g.out_edges(v);
            if (std::all_of(out.begin(), out.end(), [&](EdgeIndex e) { return in_s[g.edge(e).range]; })) {
                in_s[v] = true;
                changed = true;
            }
        }
    }
    VertexSet s;
    for (VertexIndex v = 0; v < g.vertex_count(); ++v)
        if (in_s[v]) s.push_back(v);
    return s;
}

inline std::vector<bool> membership(const WeightedDigraph& g, const VertexSet& h) {
    std::vector<bool> in(g.vertex_count(), false);
    for (VertexIndex v : h) {
        if (v >= g.vertex_count())
            detail::fail(ErrorKind::UnknownVertex, "vertex index " + std::to_string(v) + " out of range");
        in[v] = true;
    }
    return in;
}

inline VertexSet resolve_vertices(const WeightedDigraph& g, const std::vector<std::string>& names) {
    VertexSet out;
    for (const auto& n : names) out.push_back(g.index_of(n));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

inline bool is_hereditary(const WeightedDigraph& g, const VertexSet& h) {
    const auto in = membership(g, h);
    return std::all_of(g.edges().begin(), g.edges().end(),
                       [&](const Edge& e) { return !in[e.source] || in[e.range]; });
}

inline bool is_saturated(const WeightedDigraph& g, const VertexSet& h) {
    const auto in = membership(g, h);
    for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
        if (in[v] || g.is_sink(v)) continue;
        const auto out = g.out_edges(v);
        if (std::all_of(out.begin(), out.end(), [&](EdgeIndex e) { return in[g.edge(e).range]; }))
            return false;
    }
    return true;
}

inline bool is_hereditary_saturated(const WeightedDigraph& g, const VertexSet& h) {
    return is_hereditary(g, h) && is_saturated(g, h);
}

/// E/H for a hereditary saturated H.  Edges whose source or range lies in H
/// are dropped; every surviving regular vertex records its weight in `g` as
/// an explicit weight (w_r), so edges lost to H still count toward it.
inline WeightedDigraph quotient_graph(const WeightedDigraph& g, const VertexSet& h) {
    if (!is_hereditary_saturated(g, h))
        detail::fail(ErrorKind::NotHereditarySaturated, "{" + join_names(g, h) + "}");
    const auto in = membership(g, h);
    WeightedDigraph q;
    std::vector<VertexIndex> remap(g.vertex_count());
    for (VertexIndex v = 0; v < g.vertex_count(); ++v)
        if (!in[v]) remap[v] = q.add_vertex(g.name(v));
    for (const Edge& e : g.edges())
        if (!in[e.source] && !in[e.range]) q.add_edge(remap[e.source], remap[e.range], e.weight);
    for (VertexIndex v = 0; v < g.vertex_count(); ++v)
        if (!in[v] && !g.is_sink(v)) q.set_vertex_weight(remap[v], g.vertex_weight(v));
    return q;
}

/// Length of the shortest directed path from each vertex to the sink.
inline std::vector<std::size_t> shortest_sink_distances(const SandpileGraph& sg) {
    const WeightedDigraph& g = sg.graph();
    std::vector<std::vector<VertexIndex>> incoming(g.vertex_count());
    for (const Edge& e : g.edges()) incoming[e.range].push_back(e.source);
    constexpr auto unset = static_cast<std::size_t>(-1);
    std::vector<std::size_t> dist(g.vertex_count(), unset);
    std::deque<VertexIndex> queue{sg.sink()};
    dist[sg.sink()] = 0;
    while (!queue.empty()) {
        const VertexIndex v = queue.front();
        queue.pop_front();
        for (VertexIndex u : incoming[v])
            if (dist[u] == unset) {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
    }
    return dist;
}

/// Non-sink vertices of S that are not irrelevant.  SP is conical exactly
/// when this list is empty.
inline VertexSet conicality_witnesses(const SandpileGraph& sg) {
    VertexSet out;
    for (VertexIndex v : non_cycle_vertices(sg.graph()))
        if (v != sg.sink() && sg.graph().out_degree(v) != 1) out.push_back(v);
    return out;
}

}  // namespace sandk
