#pragma once

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sandk/graph.hpp"

namespace sandk {

/// A graph read from the line-based text format, plus its optional sink hint.
struct GraphFile {
    WeightedDigraph graph;
    std::optional<std::string> sink_hint;
};

namespace detail {

inline std::vector<std::string> split_ws(std::string_view line) {
    std::vector<std::string> out;
    std::istringstream in{std::string(line)};
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

inline std::optional<std::uint64_t> parse_u64(std::string_view s) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

}  // namespace detail

/// Parses
///   vertex <name>
///   edge <src> <dst> [w=<positive int>]
///   sink <name>
/// with `#` comments.  Edges must name previously declared vertices.
inline GraphFile parse_graph(std::string_view text) {
    GraphFile out;
    std::size_t lineno = 0;
    std::size_t pos = 0;
    auto bad = [&](const std::string& why) {
        detail::fail(ErrorKind::ParseError, "line " + std::to_string(lineno) + ": " + why);
    };
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        const auto toks = detail::split_ws(line);
        if (toks.empty()) continue;
        const auto& kw = toks[0];
        if (kw == "vertex") {
            if (toks.size() != 2) bad("expected 'vertex <name>'");
            if (out.graph.find(toks[1])) bad("duplicate vertex '" + toks[1] + "'");
            out.graph.add_vertex(toks[1]);
        } else if (kw == "edge") {
            if (toks.size() != 3 && toks.size() != 4) bad("expected 'edge <src> <dst> [w=<k>]'");
            Weight w = 1;
            if (toks.size() == 4) {
                if (toks[3].rfind("w=", 0) != 0) bad("expected weight as w=<k>");
                auto parsed = detail::parse_u64(std::string_view(toks[3]).substr(2));
                if (!parsed || *parsed == 0) bad("weight must be a positive integer");
                w = *parsed;
            }
            auto src = out.graph.find(toks[1]);
            auto dst = out.graph.find(toks[2]);
            if (!src) bad("undeclared vertex '" + toks[1] + "'");
            if (!dst) bad("undeclared vertex '" + toks[2] + "'");
            out.graph.add_edge(*src, *dst, w);
        } else if (kw == "sink") {
            if (toks.size() != 2) bad("expected 'sink <name>'");
            if (out.sink_hint) bad("more than one sink line");
            out.sink_hint = toks[1];
        } else {
            bad("unknown keyword '" + kw + "'");
        }
    }
    if (out.sink_hint && !out.graph.find(*out.sink_hint))
        detail::fail(ErrorKind::ParseError, "sink hint names undeclared vertex '" + *out.sink_hint + "'");
    return out;
}

inline GraphFile read_graph_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) detail::fail(ErrorKind::ParseError, "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_graph(buf.str());
}

inline std::string to_text(const WeightedDigraph& g, std::optional<VertexIndex> sink = std::nullopt) {
    std::ostringstream out;
    for (VertexIndex v = 0; v < g.vertex_count(); ++v) out << "vertex " << g.name(v) << '\n';
    for (const Edge& e : g.edges()) {
        out << "edge " << g.name(e.source) << ' ' << g.name(e.range);
        if (e.weight != 1) out << " w=" << e.weight;
        out << '\n';
    }
    if (sink) out << "sink " << g.name(*sink) << '\n';
    return out.str();
}

inline std::string to_text(const SandpileGraph& sg) { return to_text(sg.graph(), sg.sink()); }

namespace detail {

inline std::string dot_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + '"';
}

}  // namespace detail

/// DOT export: one line per parallel edge, `w=<k>` labels for weights above
/// one, sinks drawn with a doubled border.
inline std::string to_dot(const WeightedDigraph& g) {
    std::ostringstream out;
    out << "digraph G {\n";
    for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
        out << "  " << detail::dot_quote(g.name(v));
        if (g.is_sink(v)) out << " [peripheries=2]";
        out << ";\n";
    }
    for (const Edge& e : g.edges()) {
        out << "  " << detail::dot_quote(g.name(e.source)) << " -> " << detail::dot_quote(g.name(e.range));
        if (e.weight > 1) out << " [label=\"w=" << e.weight << "\"]";
        out << ";\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace sandk
