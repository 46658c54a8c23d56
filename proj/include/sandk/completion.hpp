#pragma once

#include <algorithm>
#include <deque>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "sandk/configuration.hpp"

namespace sandk {

/// How sink vertices are treated by the toppling relation.
///  Retain: sinks keep their grains and carry no relation (the free monoid
///          setting, and the sink-free presentation M_(E,w)).
///  Absorb: every sink obeys s = 0, so grains reaching it vanish (M(E,w), SP).
enum class SinkMode { Retain, Absorb };

/// Degree-lexicographic order: total grain count first, then the count
/// vector compared lexicographically with vertex 0 most significant.
inline bool deglex_less(const Configuration& a, const Configuration& b) {
    const Count ta = a.total();
    const Count tb = b.total();
    if (ta != tb) return ta < tb;
    return a < b;
}

struct RewriteRule {
    Configuration lhs;
    Configuration rhs;
};

/// A terminating, confluent rewriting system for the commutative monoid
/// presented by a vertex-weighted graph, obtained by completing the defining
/// relations w(v)v = sum r(e) under the degree-lex order.  Commutative
/// completion always terminates in principle (Dickson's lemma); the budget
/// only bounds the work done here.
///
/// Normal forms are the deglex-least members of their classes, so two
/// configurations are equal in the monoid iff their normal forms coincide.
class ConvergentSystem {
public:
    static std::optional<ConvergentSystem> complete(const WeightedDigraph& g, SinkMode mode, std::size_t budget) {
        if (!g.is_vertex_weighted())
            detail::fail(ErrorKind::NotVertexWeighted, "completion needs a vertex-weighted graph");
        ConvergentSystem sys;
        sys.n_ = g.vertex_count();
        std::deque<std::pair<Configuration, Configuration>> pending;
        for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
            if (g.is_sink(v)) {
                if (mode == SinkMode::Absorb) pending.emplace_back(Configuration::unit(sys.n_, v), Configuration(sys.n_));
                continue;
            }
            Configuration rhs(sys.n_);
            for (EdgeIndex e : g.out_edges(v)) rhs.add(g.edge(e).range, 1);
            pending.emplace_back(Configuration::unit(sys.n_, v, g.vertex_weight(v)), std::move(rhs));
        }

        std::size_t work = 0;
        while (!pending.empty()) {
            if (++work > budget) return std::nullopt;
            auto [p, q] = std::move(pending.front());
            pending.pop_front();
            p = sys.normal_form(std::move(p));
            q = sys.normal_form(std::move(q));
            if (p == q) continue;
            if (deglex_less(p, q)) std::swap(p, q);
            RewriteRule added{std::move(p), std::move(q)};

            // Rules whose left side the new rule rewrites go back to pending.
            std::vector<RewriteRule> kept;
            for (auto& r : sys.rules_) {
                if (added.lhs.divides(r.lhs))
                    pending.emplace_back(std::move(r.lhs), std::move(r.rhs));
                else
                    kept.push_back(std::move(r));
            }
            sys.rules_ = std::move(kept);
            for (const auto& r : sys.rules_) {
                if (!overlaps(r.lhs, added.lhs)) continue;
                const Configuration lcm = join(r.lhs, added.lhs);
                pending.emplace_back(shift(lcm, r.lhs, r.rhs), shift(lcm, added.lhs, added.rhs));
            }
            sys.rules_.push_back(std::move(added));
            for (auto& r : sys.rules_) r.rhs = sys.normal_form(std::move(r.rhs));
        }
        detail::ensure(sys.locally_confluent(), "completed system has an unresolved critical pair");
        return sys;
    }

    Configuration normal_form(Configuration c) const {
        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto& r : rules_) {
                if (!r.lhs.divides(c)) continue;
                Count times = std::numeric_limits<Count>::max();
                for (VertexIndex v = 0; v < n_; ++v)
                    if (r.lhs[v] > 0) times = std::min(times, c[v] / r.lhs[v]);
                for (VertexIndex v = 0; v < n_; ++v) {
                    if (r.lhs[v]) c.subtract(v, times * r.lhs[v]);
                    if (r.rhs[v]) c.add(v, detail::checked_mul(times, r.rhs[v]));
                }
                changed = true;
            }
        }
        return c;
    }

    bool equal(const Configuration& a, const Configuration& b) const { return normal_form(a) == normal_form(b); }

    const std::vector<RewriteRule>& rules() const noexcept { return rules_; }

private:
    static bool overlaps(const Configuration& a, const Configuration& b) {
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a[i] && b[i]) return true;
        return false;
    }

    static Configuration join(const Configuration& a, const Configuration& b) {
        Configuration out(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) out.set(i, std::max(a[i], b[i]));
        return out;
    }

    static Configuration shift(Configuration base, const Configuration& lhs, const Configuration& rhs) {
        for (std::size_t i = 0; i < base.size(); ++i) {
            base.subtract(i, lhs[i]);
            base.add(i, rhs[i]);
        }
        return base;
    }

    bool locally_confluent() const {
        for (std::size_t i = 0; i < rules_.size(); ++i)
            for (std::size_t j = i + 1; j < rules_.size(); ++j) {
                const auto& a = rules_[i];
                const auto& b = rules_[j];
                if (!overlaps(a.lhs, b.lhs)) continue;
                const Configuration lcm = join(a.lhs, b.lhs);
                if (normal_form(shift(lcm, a.lhs, a.rhs)) != normal_form(shift(lcm, b.lhs, b.rhs))) return false;
            }
        return true;
    }

    std::size_t n_ = 0;
    std::vector<RewriteRule> rules_;
};

}  // namespace sandk
