#pragma once

// Seeded sandpile-graph corpus shared by the property tests and the
// acceptance binary.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "sandk/sandk.hpp"

namespace sandk::testing {

struct CorpusEntry {
    std::string name;
    SandpileGraph graph;
};

inline constexpr std::uint64_t kCorpusSeed = 0x5a9d91e5ULL;

/// Random sandpile graph: 1..max_vertices non-sink vertices, out-degrees in
/// 1..max_degree, |SP| (the product of out-degrees) at most max_sp.
inline SandpileGraph random_sandpile(std::mt19937_64& rng, std::size_t max_vertices = 6, std::size_t max_degree = 4,
                                     std::size_t max_sp = 1024) {
    std::uniform_int_distribution<std::size_t> nverts(1, max_vertices);
    std::uniform_int_distribution<std::size_t> degree(1, max_degree);
    for (;;) {
        const std::size_t k = nverts(rng);
        std::vector<std::size_t> deg(k);
        std::size_t product = 1;
        for (auto& d : deg) {
            d = degree(rng);
            product *= d;
        }
        if (product > max_sp) continue;
        WeightedDigraph g;
        for (std::size_t i = 0; i < k; ++i) g.add_vertex(std::string(1, static_cast<char>('a' + i)));
        const VertexIndex s = g.add_vertex("s");
        std::uniform_int_distribution<VertexIndex> target(0, k);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t e = 0; e < deg[i]; ++e) g.add_edge(i, target(rng));
        if (!g.is_sink(s)) continue;
        try {
            return validate_sandpile(g);
        } catch (const Error&) {
            // unreachable sink or a stray sink; draw again
        }
    }
}

/// Disjoint cycles over a sink with random class sizes and out-degrees.
inline SandpileGraph random_refinement_graph(std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> nclasses(1, 3);
    std::uniform_int_distribution<std::size_t> len(1, 3);
    std::uniform_int_distribution<std::size_t> degree(2, 3);
    for (;;) {
        std::vector<std::vector<std::size_t>> classes(nclasses(rng));
        std::size_t total = 0;
        std::size_t product = 1;
        for (auto& c : classes) {
            c.resize(len(rng));
            for (auto& d : c) {
                d = degree(rng);
                product *= d;
            }
            total += c.size();
        }
        if (total <= 6 && product <= 256) return make_refinement_graph(classes);
    }
}

/// The named example graphs, a family of structured graphs and `random_count`
/// random graphs.
inline std::vector<CorpusEntry> make_corpus(std::size_t random_count = 200, std::uint64_t seed = kCorpusSeed) {
    std::vector<CorpusEntry> out;
    for (std::size_t n = 1; n <= 3; ++n)
        for (std::size_t k = 1; n + k <= 4; ++k)
            out.push_back({"G_" + std::to_string(n) + "_" + std::to_string(k), make_G_nk(n, k)});
    out.push_back({"T", make_triangle_sandpile()});
    out.push_back({"companion_221", make_cycle_companion_G({2, 2, 1})});
    out.push_back({"companion_32", make_cycle_companion_G({3, 2})});
    out.push_back({"z4", make_two_vertex_sandpile(0, 4)});
    out.push_back({"refine_23_3", make_refinement_graph({{2, 3}, {3}})});
    {
        WeightedDigraph g;  // a -> b -> s with an extra edge a -> s
        g.add_vertex("a");
        g.add_vertex("b");
        g.add_vertex("s");
        g.add_edge("a", "b");
        g.add_edge("a", "s");
        g.add_edge("b", "s");
        out.push_back({"chain", validate_sandpile(g)});
    }
    {
        WeightedDigraph g;  // a cycle plus a vertex of S with two sink edges
        g.add_vertex("a");
        g.add_vertex("b");
        g.add_vertex("c");
        g.add_vertex("s");
        g.add_edge("a", "a");
        g.add_edge("a", "s");
        g.add_edge("b", "a");
        g.add_edge("b", "c");
        g.add_edge("c", "s");
        g.add_edge("c", "s");
        out.push_back({"mixed", validate_sandpile(g)});
    }
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < 20; ++i) out.push_back({"refine_" + std::to_string(i), random_refinement_graph(rng)});
    for (std::size_t i = 0; i < random_count; ++i) out.push_back({"random_" + std::to_string(i), random_sandpile(rng)});
    return out;
}

}  // namespace sandk::testing
