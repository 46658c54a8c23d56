#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sandk/completion.hpp"
#include "sandk/configuration.hpp"
#include "sandk/graph.hpp"
#include "sandk/integer.hpp"

namespace sandk {

inline constexpr std::size_t kDefaultBudget = 100000;

/// r(w(v)v): one grain at the range of every edge v emits.
inline Configuration r_transform(const WeightedDigraph& g, VertexIndex v) {
    if (g.is_sink(v)) detail::fail(ErrorKind::SinkHasNoTransform, "'" + g.name(v) + "' is a sink");
    Configuration out(g.vertex_count());
    for (EdgeIndex e : g.out_edges(v)) out.add(g.edge(e).range, 1);
    return out;
}

namespace detail {

inline void topple_in_place(const WeightedDigraph& g, Configuration& c, VertexIndex v) {
    c.subtract(v, g.vertex_weight(v));
    for (EdgeIndex e : g.out_edges(v)) c.add(g.edge(e).range, 1);
}

inline bool unstable(const WeightedDigraph& g, const Configuration& c, VertexIndex v) {
    return !g.is_sink(v) && c[v] >= g.vertex_weight(v);
}

inline void clear_sinks(const WeightedDigraph& g, Configuration& c) {
    for (VertexIndex v = 0; v < g.vertex_count(); ++v)
        if (g.is_sink(v)) c.set(v, 0);
}

}  // namespace detail

/// One application of the toppling relation at v: remove w(v) grains from v
/// and send one grain along each edge v emits (loops return to v at once).
inline Configuration topple_once(const WeightedDigraph& g, Configuration c, VertexIndex v) {
    check_bound(g, c);
    if (g.is_sink(v)) detail::fail(ErrorKind::SinkCannotTopple, "'" + g.name(v) + "' is a sink");
    if (c.at(v) < g.vertex_weight(v))
        detail::fail(ErrorKind::VertexStable, "'" + g.name(v) + "' holds " + std::to_string(c[v]) +
                                                  " < w = " + std::to_string(g.vertex_weight(v)));
    detail::topple_in_place(g, c, v);
    return c;
}

inline Configuration topple_once(const SandpileGraph& sg, Configuration c, VertexIndex v) {
    return topple_once(sg.graph(), std::move(c), v);
}

struct StabilizationTrace {
    Configuration result;
    std::vector<Count> odometer;
    Count steps = 0;

    bool operator==(const StabilizationTrace&) const = default;
};

/// Stabilizes with a caller-chosen toppling schedule: `choose` receives the
/// currently unstable vertices (ascending) and returns one of them.
template <class Chooser>
StabilizationTrace stabilize_with(const SandpileGraph& sg, Configuration c, bool sink_absorbing, Chooser&& choose) {
    const WeightedDigraph& g = sg.graph();
    check_bound(g, c);
    StabilizationTrace trace{Configuration(), std::vector<Count>(g.vertex_count(), 0), 0};
    if (sink_absorbing) c.set(sg.sink(), 0);
    std::vector<VertexIndex> unstable;
    for (;;) {
        unstable.clear();
        for (VertexIndex v = 0; v < g.vertex_count(); ++v)
            if (detail::unstable(g, c, v)) unstable.push_back(v);
        if (unstable.empty()) break;
        const VertexIndex v = choose(std::span<const VertexIndex>(unstable));
        detail::ensure(detail::unstable(g, c, v), "schedule chose a stable vertex");
        detail::topple_in_place(g, c, v);
        if (sink_absorbing) c.set(sg.sink(), 0);
        ++trace.odometer[v];
        ++trace.steps;
    }
    trace.result = std::move(c);
    return trace;
}

/// Unique stable configuration reachable from c; lowest-index unstable
/// vertex topples first.  With sink_absorbing the sink is emptied after every
/// step (the relation s = 0); otherwise it keeps what it receives.
inline StabilizationTrace stabilize(const SandpileGraph& sg, Configuration c, bool sink_absorbing) {
    return stabilize_with(sg, std::move(c), sink_absorbing,
                          [](std::span<const VertexIndex> unstable) { return unstable.front(); });
}

/// Thrown when a step budget runs out; carries the trace up to that point.
/// Exhaustion says nothing about whether the process would terminate.
class BudgetExhausted : public Error {
public:
    BudgetExhausted(StabilizationTrace partial, std::size_t budget)
        : Error(ErrorKind::BudgetExhausted, "still unstable after " + std::to_string(budget) + " topplings"),
          partial_(std::move(partial)) {}

    const StabilizationTrace& partial() const noexcept { return partial_; }

private:
    StabilizationTrace partial_;
};

/// Stabilization on an arbitrary vertex-weighted graph, where it need not
/// terminate.  Sinks keep their grains.
inline StabilizationTrace stabilize_weighted(const WeightedDigraph& g, Configuration c,
                                             std::size_t budget = kDefaultBudget) {
    check_bound(g, c);
    if (!g.is_vertex_weighted()) detail::fail(ErrorKind::NotVertexWeighted, "stabilize_weighted");
    StabilizationTrace trace{Configuration(), std::vector<Count>(g.vertex_count(), 0), 0};
    for (;;) {
        std::optional<VertexIndex> next;
        for (VertexIndex v = 0; v < g.vertex_count() && !next; ++v)
            if (detail::unstable(g, c, v)) next = v;
        if (!next) break;
        if (trace.steps >= budget) {
            trace.result = std::move(c);
            throw BudgetExhausted(std::move(trace), budget);
        }
        detail::topple_in_place(g, c, *next);
        ++trace.odometer[*next];
        ++trace.steps;
    }
    trace.result = std::move(c);
    return trace;
}

/// p(c) = sum_v c[v] * D^(n - l_v) with D = max(2, max w(v)), n = |E^0| and
/// l_v the distance from v to the sink.  Strictly increases under every
/// toppling when sink grains are kept.
inline BigInt potential(const SandpileGraph& sg, const Configuration& c) {
    const WeightedDigraph& g = sg.graph();
    check_bound(g, c);
    Weight d = 2;
    for (VertexIndex v = 0; v < g.vertex_count(); ++v)
        if (!g.is_sink(v)) d = std::max(d, g.vertex_weight(v));
    const auto dist = shortest_sink_distances(sg);
    const std::size_t n = g.vertex_count();
    BigInt total = 0;
    for (VertexIndex v = 0; v < n; ++v) {
        if (c[v] == 0) continue;
        total += BigInt(c[v]) * boost::multiprecision::pow(BigInt(d), static_cast<unsigned>(n - dist[v]));
    }
    return total;
}

/// A common reduct together with the toppling sequences that reach it.
struct CommonReduct {
    Configuration meet;
    std::vector<VertexIndex> steps_from_a;
    std::vector<VertexIndex> steps_from_b;
};

/// Replays a toppling sequence; in Absorb mode sinks are emptied first and
/// after each step.
inline Configuration replay(const WeightedDigraph& g, Configuration c, const std::vector<VertexIndex>& steps,
                            SinkMode mode) {
    check_bound(g, c);
    if (mode == SinkMode::Absorb) detail::clear_sinks(g, c);
    for (VertexIndex v : steps) {
        c = topple_once(g, std::move(c), v);
        if (mode == SinkMode::Absorb) detail::clear_sinks(g, c);
    }
    return c;
}

namespace detail {

/// Breadth-first forward closure under single topplings, grown one level at
/// a time.
class ForwardClosure {
public:
    ForwardClosure(const WeightedDigraph& g, Configuration start, SinkMode mode) : g_(g), mode_(mode) {
        if (mode_ == SinkMode::Absorb) clear_sinks(g_, start);
        parent_.emplace(start, std::pair<Configuration, VertexIndex>{start, 0});
        frontier_.push_back(std::move(start));
    }

    bool exhausted() const noexcept { return frontier_.empty(); }
    bool contains(const Configuration& c) const { return parent_.count(c) != 0; }
    const std::vector<Configuration>& frontier() const noexcept { return frontier_; }

    const Configuration& root() const { return root_cache(); }

    /// Expands the current frontier; returns the number of single topplings
    /// applied, stopping early once `budget` would be exceeded.
    std::size_t expand(std::size_t budget) {
        std::vector<Configuration> next;
        std::size_t used = 0;
        for (const auto& c : frontier_) {
            for (VertexIndex v = 0; v < g_.vertex_count(); ++v) {
                if (!unstable(g_, c, v)) continue;
                if (used >= budget) {
                    truncated_ = true;
                    frontier_ = std::move(next);
                    return used;
                }
                ++used;
                Configuration d = c;
                topple_in_place(g_, d, v);
                if (mode_ == SinkMode::Absorb) clear_sinks(g_, d);
                if (parent_.count(d)) continue;
                parent_.emplace(d, std::pair<Configuration, VertexIndex>{c, v});
                next.push_back(std::move(d));
            }
        }
        frontier_ = std::move(next);
        return used;
    }

    bool truncated() const noexcept { return truncated_; }

    std::vector<VertexIndex> path_to(const Configuration& target) const {
        std::vector<VertexIndex> steps;
        Configuration cur = target;
        for (;;) {
            const auto& [prev, v] = parent_.at(cur);
            if (prev == cur) break;
            steps.push_back(v);
            cur = prev;
        }
        std::reverse(steps.begin(), steps.end());
        return steps;
    }

    std::optional<Configuration> meet(const ForwardClosure& other) const {
        std::optional<Configuration> best;
        for (const auto& [c, _] : parent_)
            if (other.contains(c) && (!best || deglex_less(c, *best))) best = c;
        return best;
    }

private:
    const Configuration& root_cache() const {
        for (const auto& [c, p] : parent_)
            if (p.first == c) return c;
        fail(ErrorKind::InternalInvariant, "closure without root");
    }

    const WeightedDigraph& g_;
    SinkMode mode_;
    std::unordered_map<Configuration, std::pair<Configuration, VertexIndex>, ConfigurationHash> parent_;
    std::vector<Configuration> frontier_;
    bool truncated_ = false;
};

struct ReductSearch {
    std::optional<CommonReduct> found;
    bool a_exhausted = false;
    bool b_exhausted = false;
};

inline ReductSearch search_common_reduct(const WeightedDigraph& g, const Configuration& a, const Configuration& b,
                                         std::size_t budget, SinkMode mode) {
    check_bound(g, a);
    check_bound(g, b);
    if (!g.is_vertex_weighted()) fail(ErrorKind::NotVertexWeighted, "common_reduct");
    ForwardClosure fa(g, a, mode);
    ForwardClosure fb(g, b, mode);
    ReductSearch out;
    auto finish = [&](const Configuration& c) {
        out.found = CommonReduct{c, fa.path_to(c), fb.path_to(c)};
    };
    if (auto c = fa.meet(fb)) {
        finish(*c);
        return out;
    }
    std::size_t remaining = budget;
    while (remaining > 0 && (!fa.exhausted() || !fb.exhausted())) {
        for (ForwardClosure* side : {&fa, &fb}) {
            if (side->exhausted() || remaining == 0) continue;
            remaining -= side->expand(remaining);
            for (const auto& c : side->frontier())
                if ((side == &fa ? fb : fa).contains(c)) {
                    // Pick the deglex-least meeting point for deterministic output.
                    finish(*fa.meet(fb));
                    return out;
                }
        }
    }
    out.a_exhausted = fa.exhausted() && !fa.truncated();
    out.b_exhausted = fb.exhausted() && !fb.truncated();
    return out;
}

}  // namespace detail

/// Finds c with a -> c and b -> c by growing both forward closures level by
/// level.  Failure within the budget is not a proof of inequivalence.
inline CommonReduct common_reduct(const WeightedDigraph& g, const Configuration& a, const Configuration& b,
                                  std::size_t budget = kDefaultBudget, SinkMode mode = SinkMode::Retain) {
    auto search = detail::search_common_reduct(g, a, b, budget, mode);
    if (search.found) return std::move(*search.found);
    if (search.a_exhausted && search.b_exhausted)
        detail::fail(ErrorKind::NotFoundWithinBudget, "both forward closures are finite and disjoint");
    detail::fail(ErrorKind::NotFoundWithinBudget, "no common reduct within " + std::to_string(budget) + " topplings");
}

inline CommonReduct common_reduct(const SandpileGraph& sg, const Configuration& a, const Configuration& b,
                                  std::size_t budget = kDefaultBudget, SinkMode mode = SinkMode::Retain) {
    return common_reduct(sg.graph(), a, b, budget, mode);
}

enum class Verdict { Yes, No, Undecided };

inline std::string_view verdict_name(Verdict v) {
    switch (v) {
    case Verdict::Yes: return "yes";
    case Verdict::No: return "no";
    case Verdict::Undecided: return "undecided";
    }
    return "?";
}

/// Equality in SP (Absorb) or in the sink-retaining free-monoid quotient
/// (Retain), decided exactly by comparing normal forms.
inline Verdict equivalent(const SandpileGraph& sg, const Configuration& a, const Configuration& b,
                          SinkMode mode = SinkMode::Absorb) {
    const bool absorbing = mode == SinkMode::Absorb;
    return stabilize(sg, a, absorbing).result == stabilize(sg, b, absorbing).result ? Verdict::Yes : Verdict::No;
}

/// Equality in the monoid of a vertex-weighted graph.
///  Yes: a common reduct was found.
///  No:  both forward closures are finite, enumerated and disjoint, or the
///       completed presentation gives distinct normal forms.
///  Undecided: neither happened within the budget.
inline Verdict equivalent(const WeightedDigraph& g, const Configuration& a, const Configuration& b,
                          std::size_t budget = kDefaultBudget, SinkMode mode = SinkMode::Retain) {
    if (a == b) return Verdict::Yes;
    auto search = detail::search_common_reduct(g, a, b, budget, mode);
    if (search.found) return Verdict::Yes;
    if (search.a_exhausted && search.b_exhausted) return Verdict::No;
    auto system = ConvergentSystem::complete(g, mode, budget);
    if (!system) return Verdict::Undecided;
    return system->equal(a, b) ? Verdict::Yes : Verdict::No;
}

}  // namespace sandk
