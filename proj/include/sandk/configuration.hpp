#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sandk/graph.hpp"
#include "sandk/graph_io.hpp"

namespace sandk {

using Count = std::uint64_t;

namespace detail {

inline Count checked_add(Count a, Count b) {
    Count r = 0;
    if (__builtin_add_overflow(a, b, &r)) fail(ErrorKind::Overflow, "grain count overflow");
    return r;
}

inline Count checked_mul(Count a, Count b) {
    Count r = 0;
    if (__builtin_mul_overflow(a, b, &r)) fail(ErrorKind::Overflow, "grain count overflow");
    return r;
}

}  // namespace detail

/// An element of the free commutative monoid on the vertices: one
/// non-negative grain count per vertex of the graph it is used with.
class Configuration {
public:
    Configuration() = default;
    explicit Configuration(std::size_t vertex_count) : counts_(vertex_count, 0) {}
    explicit Configuration(std::vector<Count> counts) : counts_(std::move(counts)) {}

    static Configuration unit(std::size_t vertex_count, VertexIndex v, Count k = 1) {
        Configuration c(vertex_count);
        c.counts_.at(v) = k;
        return c;
    }

    std::size_t size() const noexcept { return counts_.size(); }
    Count operator[](VertexIndex v) const { return counts_[v]; }
    Count at(VertexIndex v) const { return counts_.at(v); }
    std::span<const Count> counts() const noexcept { return counts_; }

    void set(VertexIndex v, Count k) { counts_.at(v) = k; }
    void add(VertexIndex v, Count k) { counts_.at(v) = detail::checked_add(counts_.at(v), k); }
    void subtract(VertexIndex v, Count k) {
        detail::ensure(counts_.at(v) >= k, "configuration count would go negative");
        counts_[v] -= k;
    }

    Count total() const {
        Count t = 0;
        for (Count k : counts_) t = detail::checked_add(t, k);
        return t;
    }

    bool is_zero() const {
        return std::all_of(counts_.begin(), counts_.end(), [](Count k) { return k == 0; });
    }

    /// Pointwise <=, i.e. `other` contains this configuration.
    bool divides(const Configuration& other) const {
        for (std::size_t i = 0; i < counts_.size(); ++i)
            if (counts_[i] > other.counts_[i]) return false;
        return true;
    }

    Configuration& operator+=(const Configuration& other) {
        detail::ensure(other.size() == size(), "adding configurations of different graphs");
        for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] = detail::checked_add(counts_[i], other.counts_[i]);
        return *this;
    }

    friend Configuration operator+(Configuration a, const Configuration& b) { return a += b; }

    bool operator==(const Configuration&) const = default;
    auto operator<=>(const Configuration&) const = default;

private:
    std::vector<Count> counts_;
};

struct ConfigurationHash {
    std::size_t operator()(const Configuration& c) const noexcept {
        std::size_t h = 0xcbf29ce484222325ULL;
        for (Count k : c.counts()) {
            h ^= std::hash<Count>{}(k) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return h;
    }
};

inline void check_bound(const WeightedDigraph& g, const Configuration& c) {
    if (c.size() != g.vertex_count())
        detail::fail(ErrorKind::ConfigurationMismatch, "configuration has " + std::to_string(c.size()) +
                                                           " entries but the graph has " +
                                                           std::to_string(g.vertex_count()) + " vertices");
}

/// Parses `v1=3,v2=0,s=1`; omitted vertices are zero, whitespace is ignored.
inline Configuration parse_configuration(const WeightedDigraph& g, std::string_view text) {
    Configuration c(g.vertex_count());
    std::string cleaned;
    for (char ch : text)
        if (ch != ' ' && ch != '\t') cleaned += ch;
    std::size_t pos = 0;
    while (pos < cleaned.size()) {
        auto comma = cleaned.find(',', pos);
        if (comma == std::string::npos) comma = cleaned.size();
        const std::string_view item(cleaned.data() + pos, comma - pos);
        pos = comma + 1;
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string_view::npos)
            detail::fail(ErrorKind::ParseError, "expected name=count, got '" + std::string(item) + "'");
        const auto count = detail::parse_u64(item.substr(eq + 1));
        if (!count) detail::fail(ErrorKind::ParseError, "bad count in '" + std::string(item) + "'");
        c.add(g.index_of(item.substr(0, eq)), *count);
    }
    return c;
}

/// `name=count` for every vertex, comma separated, in vertex order.
inline std::string format_configuration(const WeightedDigraph& g, const Configuration& c) {
    check_bound(g, c);
    std::string out;
    for (VertexIndex v = 0; v < c.size(); ++v) {
        if (!out.empty()) out += ',';
        out += g.name(v) + "=" + std::to_string(c[v]);
    }
    return out;
}

/// Additive notation used for monoid element labels: `2u+v`, or `0`.
inline std::string format_sum(const WeightedDigraph& g, const Configuration& c) {
    check_bound(g, c);
    std::string out;
    for (VertexIndex v = 0; v < c.size(); ++v) {
        if (c[v] == 0) continue;
        if (!out.empty()) out += '+';
        if (c[v] > 1) out += std::to_string(c[v]);
        out += g.name(v);
    }
    return out.empty() ? "0" : out;
}

}  // namespace sandk
