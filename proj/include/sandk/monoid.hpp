#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sandk/completion.hpp"
#include "sandk/configuration.hpp"
#include "sandk/graph.hpp"
#include "sandk/matrix.hpp"
#include "sandk/rewrite.hpp"

namespace sandk {

using ElementIndex = std::size_t;

inline constexpr std::size_t kDefaultSandpileCap = 1000000;
inline constexpr std::size_t kDefaultWeightedCap = 10000;
inline constexpr std::size_t kDefaultIsomorphismCap = 10000;
// Largest Cayley table (entries) we are willing to allocate.
inline constexpr std::size_t kMaxTableEntries = std::size_t{1} << 28;

/// A finite commutative monoid given by its full addition table.  Elements
/// are dense indices with display labels and, when the monoid came from a
/// graph, a canonical configuration per element.
class FiniteCommMonoid {
public:
    FiniteCommMonoid(std::vector<std::string> labels, ElementIndex zero, std::vector<ElementIndex> table,
                     std::vector<ElementIndex> generators = {}, std::vector<Configuration> representatives = {})
        : labels_(std::move(labels)),
          zero_(zero),
          table_(std::move(table)),
          generators_(std::move(generators)),
          reps_(std::move(representatives)) {
        validate();
        for (ElementIndex i = 0; i < reps_.size(); ++i) rep_index_.emplace(reps_[i], i);
    }

    std::size_t size() const noexcept { return labels_.size(); }
    ElementIndex zero() const noexcept { return zero_; }
    ElementIndex add(ElementIndex a, ElementIndex b) const { return table_[a * size() + b]; }
    std::span<const ElementIndex> row(ElementIndex a) const { return {table_.data() + a * size(), size()}; }

    const std::string& label(ElementIndex a) const { return labels_.at(a); }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    const std::vector<ElementIndex>& generators() const noexcept { return generators_; }

    bool has_representatives() const noexcept { return !reps_.empty(); }
    const std::vector<Configuration>& representatives() const noexcept { return reps_; }

    std::optional<ElementIndex> find(const Configuration& rep) const {
        auto it = rep_index_.find(rep);
        if (it == rep_index_.end()) return std::nullopt;
        return it->second;
    }

    std::optional<ElementIndex> find_label(std::string_view label) const {
        for (ElementIndex i = 0; i < size(); ++i)
            if (labels_[i] == label) return i;
        return std::nullopt;
    }

    ElementIndex multiple(ElementIndex a, std::size_t k) const {
        ElementIndex out = zero_;
        for (std::size_t i = 0; i < k; ++i) out = add(out, a);
        return out;
    }

private:
    void validate() const {
        const std::size_t n = size();
        auto bad = [](const std::string& why) { detail::fail(ErrorKind::BadParameters, "monoid table: " + why); };
        if (n == 0) bad("no elements");
        if (table_.size() != n * n) bad("table is not |M| x |M|");
        if (zero_ >= n) bad("zero out of range");
        if (!reps_.empty() && reps_.size() != n) bad("one representative per element required");
        for (ElementIndex x : table_)
            if (x >= n) bad("entry out of range");
        for (ElementIndex g : generators_)
            if (g >= n) bad("generator out of range");
        for (ElementIndex a = 0; a < n; ++a) {
            if (add(zero_, a) != a) bad("zero is not an identity");
            for (ElementIndex b = a + 1; b < n; ++b)
                if (add(a, b) != add(b, a)) bad("not commutative");
        }
        auto assoc = [&](ElementIndex a, ElementIndex b, ElementIndex c) {
            if (add(add(a, b), c) != add(a, add(b, c))) bad("not associative");
        };
        if (n <= 64) {
            for (ElementIndex a = 0; a < n; ++a)
                for (ElementIndex b = 0; b < n; ++b)
                    for (ElementIndex c = 0; c < n; ++c) assoc(a, b, c);
        } else {
            std::mt19937_64 rng(0x5eed);
            std::uniform_int_distribution<ElementIndex> pick(0, n - 1);
            for (int i = 0; i < 20000; ++i) assoc(pick(rng), pick(rng), pick(rng));
        }
    }

    std::vector<std::string> labels_;
    ElementIndex zero_;
    std::vector<ElementIndex> table_;
    std::vector<ElementIndex> generators_;
    std::vector<Configuration> reps_;
    std::unordered_map<Configuration, ElementIndex, ConfigurationHash> rep_index_;
};

namespace detail {

inline void check_table_size(std::size_t n) {
    if (n != 0 && n > kMaxTableEntries / n)
        fail(ErrorKind::SizeOverBudget, "Cayley table with " + std::to_string(n) + "^2 entries");
}

inline std::vector<ElementIndex> dedup_nonzero(std::vector<ElementIndex> xs, ElementIndex zero) {
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    xs.erase(std::remove(xs.begin(), xs.end(), zero), xs.end());
    return xs;
}

}  // namespace detail

/// SP(E): stable configurations (sink at zero) under add-then-stabilize.
/// Element i is the mixed-radix number with digits c[v] < out-degree(v),
/// the first non-sink vertex least significant.
inline FiniteCommMonoid enumerate_sandpile_monoid(const SandpileGraph& sg, std::size_t cap = kDefaultSandpileCap) {
    const WeightedDigraph& g = sg.graph();
    std::vector<VertexIndex> digits;
    std::size_t size = 1;
    for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
        if (v == sg.sink()) continue;
        digits.push_back(v);
        if (g.out_degree(v) > cap / size)
            detail::fail(ErrorKind::SizeOverBudget, "|SP| exceeds the cap of " + std::to_string(cap));
        size *= g.out_degree(v);
    }
    if (size > cap) detail::fail(ErrorKind::SizeOverBudget, "|SP| exceeds the cap of " + std::to_string(cap));
    detail::check_table_size(size);

    auto decode = [&](std::size_t i) {
        Configuration c(g.vertex_count());
        for (VertexIndex v : digits) {
            c.set(v, i % g.out_degree(v));
            i /= g.out_degree(v);
        }
        return c;
    };
    auto encode = [&](const Configuration& c) {
        std::size_t i = 0;
        for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
            detail::ensure(c[*it] < g.out_degree(*it), "unstable configuration has no element index");
            i = i * g.out_degree(*it) + c[*it];
        }
        detail::ensure(c[sg.sink()] == 0, "sink not absorbed");
        return i;
    };

    std::vector<Configuration> reps;
    std::vector<std::string> labels;
    reps.reserve(size);
    for (std::size_t i = 0; i < size; ++i) {
        reps.push_back(decode(i));
        labels.push_back(format_sum(g, reps.back()));
    }
    std::vector<ElementIndex> table(size * size);
    for (std::size_t a = 0; a < size; ++a)
        for (std::size_t b = a; b < size; ++b) {
            const auto sum = encode(stabilize(sg, reps[a] + reps[b], true).result);
            table[a * size + b] = sum;
            table[b * size + a] = sum;
        }
    std::vector<ElementIndex> gens;
    for (VertexIndex v : digits)
        gens.push_back(encode(stabilize(sg, Configuration::unit(g.vertex_count(), v), true).result));
    FiniteCommMonoid m(std::move(labels), 0, std::move(table), detail::dedup_nonzero(std::move(gens), 0),
                       std::move(reps));

    std::size_t expected = 1;
    for (VertexIndex v : digits) expected *= g.out_degree(v);
    detail::ensure(m.size() == expected, "|SP| differs from the product of out-degrees");
    return m;
}

/// Stable representative of c in SP(E), as an element index of `sp`.
inline ElementIndex sandpile_element(const SandpileGraph& sg, const FiniteCommMonoid& sp, const Configuration& c) {
    auto idx = sp.find(stabilize(sg, c, true).result);
    detail::ensure(idx.has_value(), "stable configuration missing from SP");
    return *idx;
}

enum class MonoidVariant { WithSinkRelations, NoSinkRelations };

struct EnumerationCaps {
    std::size_t max_elements = kDefaultWeightedCap;
    std::size_t budget = kDefaultBudget;
};

/// Enumeration could not be completed; says nothing about finiteness.
class Inconclusive : public Error {
public:
    Inconclusive(std::string why, std::vector<std::string> partial)
        : Error(ErrorKind::Inconclusive, std::move(why)), partial_(std::move(partial)) {}

    const std::vector<std::string>& partial_elements() const noexcept { return partial_; }

private:
    std::vector<std::string> partial_;
};

/// M(E,w) (with s = 0 at every sink) or M_(E,w) (no sink relations).
/// Elements are the normal forms of the completed presentation, i.e. the
/// deglex-least configuration of each class, listed by grain count.
inline FiniteCommMonoid enumerate_weighted_monoid(const WeightedDigraph& g, MonoidVariant variant,
                                                  EnumerationCaps caps = {}) {
    if (!g.is_vertex_weighted()) detail::fail(ErrorKind::NotVertexWeighted, "enumerate_weighted_monoid");
    const SinkMode mode = variant == MonoidVariant::WithSinkRelations ? SinkMode::Absorb : SinkMode::Retain;
    auto system = ConvergentSystem::complete(g, mode, caps.budget);
    if (!system) throw Inconclusive("presentation did not complete within " + std::to_string(caps.budget) + " steps", {});

    const std::size_t n = g.vertex_count();
    std::vector<Configuration> gens;
    for (VertexIndex v = 0; v < n; ++v) {
        auto c = system->normal_form(Configuration::unit(n, v));
        if (!c.is_zero() && std::find(gens.begin(), gens.end(), c) == gens.end()) gens.push_back(std::move(c));
    }
    std::vector<Configuration> found{Configuration(n)};
    std::unordered_map<Configuration, ElementIndex, ConfigurationHash> seen{{found.front(), 0}};
    for (std::size_t i = 0; i < found.size(); ++i)
        for (const auto& gen : gens) {
            auto c = system->normal_form(found[i] + gen);
            if (seen.count(c)) continue;
            if (found.size() >= caps.max_elements) {
                std::vector<std::string> partial;
                for (const auto& f : found) partial.push_back(format_sum(g, f));
                throw Inconclusive("more than " + std::to_string(caps.max_elements) + " elements", std::move(partial));
            }
            seen.emplace(c, found.size());
            found.push_back(std::move(c));
        }

    std::sort(found.begin(), found.end(), [](const Configuration& a, const Configuration& b) {
        if (a.total() != b.total()) return a.total() < b.total();
        return a > b;
    });
    const std::size_t size = found.size();
    detail::check_table_size(size);
    std::unordered_map<Configuration, ElementIndex, ConfigurationHash> index;
    std::vector<std::string> labels;
    for (ElementIndex i = 0; i < size; ++i) {
        index.emplace(found[i], i);
        labels.push_back(format_sum(g, found[i]));
    }
    std::vector<ElementIndex> table(size * size);
    for (ElementIndex a = 0; a < size; ++a)
        for (ElementIndex b = a; b < size; ++b) {
            const auto sum = index.at(system->normal_form(found[a] + found[b]));
            table[a * size + b] = sum;
            table[b * size + a] = sum;
        }
    std::vector<ElementIndex> gen_idx;
    for (const auto& gen : gens) gen_idx.push_back(index.at(gen));
    return FiniteCommMonoid(std::move(labels), 0, std::move(table), detail::dedup_nonzero(std::move(gen_idx), 0),
                            std::move(found));
}

// ---------------------------------------------------------------------------
// Predicates

inline std::vector<ElementIndex> units(const FiniteCommMonoid& m) {
    std::vector<ElementIndex> out;
    for (ElementIndex a = 0; a < m.size(); ++a) {
        const auto r = m.row(a);
        if (std::find(r.begin(), r.end(), m.zero()) != r.end()) out.push_back(a);
    }
    // Z(M) is a subgroup.
    for (ElementIndex a : out)
        for (ElementIndex b : out)
            detail::ensure(std::binary_search(out.begin(), out.end(), m.add(a, b)), "unit group not closed");
    return out;
}

inline bool is_conical(const FiniteCommMonoid& m) { return units(m).size() == 1; }

inline bool is_group(const FiniteCommMonoid& m) { return units(m).size() == m.size(); }

inline std::vector<ElementIndex> atoms(const FiniteCommMonoid& m) {
    std::vector<bool> decomposable(m.size(), false);
    for (ElementIndex b = 0; b < m.size(); ++b)
        for (ElementIndex c = 0; c < m.size(); ++c)
            if (b != m.zero() && c != m.zero()) decomposable[m.add(b, c)] = true;
    std::vector<ElementIndex> out;
    for (ElementIndex a = 0; a < m.size(); ++a)
        if (a != m.zero() && !decomposable[a]) out.push_back(a);
    return out;
}

inline std::vector<ElementIndex> idempotents(const FiniteCommMonoid& m) {
    std::vector<ElementIndex> out;
    for (ElementIndex a = 0; a < m.size(); ++a)
        if (m.add(a, a) == a) out.push_back(a);
    return out;
}

/// Smallest submonoid containing `gens`.
inline std::vector<ElementIndex> generated_submonoid(const FiniteCommMonoid& m, const std::vector<ElementIndex>& gens) {
    std::vector<bool> in(m.size(), false);
    std::vector<ElementIndex> queue{m.zero()};
    in[m.zero()] = true;
    for (std::size_t i = 0; i < queue.size(); ++i)
        for (ElementIndex g : gens) {
            const ElementIndex x = m.add(queue[i], g);
            if (!in[x]) {
                in[x] = true;
                queue.push_back(x);
            }
        }
    std::sort(queue.begin(), queue.end());
    return queue;
}

namespace detail {

/// For each x, the solutions e of x + e = y, grouped by y.
class Differences {
public:
    explicit Differences(const FiniteCommMonoid& m) : n_(m.size()), offset_(n_ * (n_ + 1)), data_(n_ * n_) {
        for (ElementIndex x = 0; x < n_; ++x) {
            std::size_t* off = &offset_[x * (n_ + 1)];
            for (ElementIndex e = 0; e < n_; ++e) ++off[m.add(x, e) + 1];
            for (std::size_t y = 0; y < n_; ++y) off[y + 1] += off[y];
            std::vector<std::size_t> fill(off, off + n_);
            for (ElementIndex e = 0; e < n_; ++e) data_[x * n_ + fill[m.add(x, e)]++] = e;
        }
    }

    std::span<const ElementIndex> solve(ElementIndex x, ElementIndex y) const {
        const std::size_t* off = &offset_[x * (n_ + 1)];
        return {data_.data() + x * n_ + off[y], off[y + 1] - off[y]};
    }

private:
    std::size_t n_;
    std::vector<std::size_t> offset_;
    std::vector<ElementIndex> data_;
};

inline std::optional<std::array<ElementIndex, 4>> refine(const FiniteCommMonoid& m, const Differences& diff,
                                                         ElementIndex a, ElementIndex b, ElementIndex c,
                                                         ElementIndex d) {
    for (ElementIndex e1 = 0; e1 < m.size(); ++e1) {
        const auto e2s = diff.solve(e1, a);
        if (e2s.empty()) continue;
        const auto e3s = diff.solve(e1, c);
        if (e3s.empty()) continue;
        for (ElementIndex e2 : e2s)
            for (ElementIndex e4 : diff.solve(e2, d))
                for (ElementIndex e3 : e3s)
                    if (m.add(e3, e4) == b) return std::array<ElementIndex, 4>{e1, e2, e3, e4};
    }
    return std::nullopt;
}

}  // namespace detail

/// e1..e4 with a = e1+e2, b = e3+e4, c = e1+e3, d = e2+e4, if any.
inline std::optional<std::array<ElementIndex, 4>> refinement_holds_for(const FiniteCommMonoid& m, ElementIndex a,
                                                                       ElementIndex b, ElementIndex c,
                                                                       ElementIndex d) {
    if (m.add(a, b) != m.add(c, d)) detail::fail(ErrorKind::BadParameters, "a + b != c + d");
    return detail::refine(m, detail::Differences(m), a, b, c, d);
}

struct RefinementResult {
    bool refinement = true;
    /// (a, b, c, d) with a + b = c + d admitting no refinement.
    std::optional<std::array<ElementIndex, 4>> counterexample;
};

inline RefinementResult check_refinement(const FiniteCommMonoid& m) {
    const detail::Differences diff(m);
    std::vector<std::vector<std::pair<ElementIndex, ElementIndex>>> by_sum(m.size());
    for (ElementIndex a = 0; a < m.size(); ++a)
        for (ElementIndex b = a; b < m.size(); ++b) by_sum[m.add(a, b)].emplace_back(a, b);
    for (const auto& pairs : by_sum)
        for (std::size_t i = 0; i < pairs.size(); ++i)
            for (std::size_t j = i + 1; j < pairs.size(); ++j) {
                const auto [a, b] = pairs[i];
                const auto [c, d] = pairs[j];
                if (!detail::refine(m, diff, a, b, c, d))
                    return RefinementResult{false, std::array<ElementIndex, 4>{a, b, c, d}};
            }
    return {};
}

inline bool is_refinement(const FiniteCommMonoid& m) { return check_refinement(m).refinement; }

struct AtomCancellativeResult {
    bool atom_cancellative = true;
    /// (atom a, m, m') with a + m = a + m' and m != m'.
    std::optional<std::array<ElementIndex, 3>> counterexample;
};

inline AtomCancellativeResult check_atom_cancellative(const FiniteCommMonoid& m) {
    for (ElementIndex a : atoms(m)) {
        std::vector<std::optional<ElementIndex>> first(m.size());
        for (ElementIndex x = 0; x < m.size(); ++x) {
            auto& slot = first[m.add(a, x)];
            if (slot) return AtomCancellativeResult{false, std::array<ElementIndex, 3>{a, *slot, x}};
            slot = x;
        }
    }
    return {};
}

inline bool is_atom_cancellative(const FiniteCommMonoid& m) { return check_atom_cancellative(m).atom_cancellative; }

// ---------------------------------------------------------------------------
// Smallest ideal and group completion

struct SmallestIdeal {
    /// Elements of I, ascending, as indices of the parent monoid.
    std::vector<ElementIndex> elements;
    /// The idempotent z of I, as a parent index.
    ElementIndex identity = 0;
    /// I as a group; element i corresponds to elements[i].
    FiniteCommMonoid group;
};

/// I = intersection of all translates a + M, which equals
/// H(M) = {a : a >= b for all b}.  I is a group whose identity is the unique
/// idempotent it contains.
inline SmallestIdeal smallest_ideal(const FiniteCommMonoid& m) {
    const std::size_t n = m.size();
    std::vector<bool> in(n, true);
    for (ElementIndex a = 0; a < n; ++a) {
        std::vector<bool> translate(n, false);
        for (ElementIndex x : m.row(a)) translate[x] = true;
        for (ElementIndex x = 0; x < n; ++x) in[x] = in[x] && translate[x];
    }
    const detail::Differences diff(m);
    std::vector<ElementIndex> ideal;
    for (ElementIndex x = 0; x < n; ++x) {
        bool dominates = true;
        for (ElementIndex b = 0; b < n && dominates; ++b) dominates = !diff.solve(b, x).empty();
        detail::ensure(dominates == in[x], "smallest ideal differs from H(M)");
        if (in[x]) ideal.push_back(x);
    }
    ElementIndex total = m.zero();
    for (ElementIndex a = 0; a < n; ++a) total = m.add(total, a);
    detail::ensure(in[total], "sum of all elements lies outside the smallest ideal");

    std::optional<ElementIndex> z;
    for (ElementIndex x : ideal)
        if (m.add(x, x) == x) {
            detail::ensure(!z, "smallest ideal has two idempotents");
            z = x;
        }
    detail::ensure(z.has_value(), "smallest ideal has no idempotent");

    std::vector<ElementIndex> pos(n, n);
    for (std::size_t i = 0; i < ideal.size(); ++i) pos[ideal[i]] = i;
    const std::size_t k = ideal.size();
    std::vector<ElementIndex> table(k * k);
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < k; ++i) {
        labels.push_back(m.label(ideal[i]));
        for (std::size_t j = 0; j < k; ++j) {
            const ElementIndex s = m.add(ideal[i], ideal[j]);
            detail::ensure(pos[s] < k, "smallest ideal not closed");
            table[i * k + j] = pos[s];
        }
    }
    std::vector<Configuration> reps;
    if (m.has_representatives())
        for (ElementIndex x : ideal) reps.push_back(m.representatives()[x]);
    FiniteCommMonoid group(std::move(labels), pos[*z], std::move(table), {}, std::move(reps));
    detail::ensure(is_group(group), "smallest ideal is not a group");
    for (ElementIndex a = 0; a < n; ++a) detail::ensure(in[m.add(*z, a)], "z + m outside the smallest ideal");
    return SmallestIdeal{std::move(ideal), *z, std::move(group)};
}

namespace detail {

inline std::vector<std::size_t> prime_factors(std::size_t n) {
    std::vector<std::size_t> ps;
    for (std::size_t p = 2; p * p <= n; ++p)
        if (n % p == 0) {
            ps.push_back(p);
            while (n % p == 0) n /= p;
        }
    if (n > 1) ps.push_back(n);
    return ps;
}

inline std::size_t element_order(const FiniteCommMonoid& g, ElementIndex x) {
    std::size_t k = 1;
    for (ElementIndex y = x; y != g.zero(); y = g.add(y, x)) ++k;
    return k;
}

}  // namespace detail

/// Invariant factors of a finite abelian group from the number of elements
/// of each p-power order: #{x : p^j x = 0} = p^(sum_i min(j, a_i)).
inline AbelianGroupInvariants group_invariants_by_orders(const FiniteCommMonoid& g) {
    if (!is_group(g)) detail::fail(ErrorKind::BadParameters, "not a group");
    const std::size_t n = g.size();
    std::vector<std::size_t> orders(n);
    for (ElementIndex x = 0; x < n; ++x) orders[x] = detail::element_order(g, x);
    std::vector<BigInt> moduli;
    for (std::size_t p : detail::prime_factors(n)) {
        // rank[j-1] = #{i : a_i >= j}
        std::vector<std::size_t> rank;
        std::size_t prev = 1;
        for (std::size_t pj = p;; pj *= p) {
            std::size_t count = 0;
            for (std::size_t o : orders)
                if (pj % o == 0) ++count;
            std::size_t ratio = count / prev;
            detail::ensure(ratio * prev == count, "p-torsion count is not a p-power multiple");
            std::size_t r = 0;
            while (ratio > 1) {
                detail::ensure(ratio % p == 0, "p-torsion count is not a p-power");
                ratio /= p;
                ++r;
            }
            if (r == 0) break;
            rank.push_back(r);
            prev = count;
        }
        const std::size_t parts = rank.empty() ? 0 : rank.front();
        for (std::size_t i = 1; i <= parts; ++i) {
            BigInt q = 1;
            for (std::size_t r : rank)
                if (r >= i) q *= p;
            moduli.push_back(q);
        }
    }
    return invariants_from_moduli(std::move(moduli));
}

/// Invariant factors of a finite abelian group as Z^r modulo the relations
/// read off a spanning tree of its Cayley graph on r chosen generators.
inline AbelianGroupInvariants group_invariants_by_relations(const FiniteCommMonoid& g) {
    if (!is_group(g)) detail::fail(ErrorKind::BadParameters, "not a group");
    const std::size_t n = g.size();
    std::vector<ElementIndex> gens;
    std::vector<ElementIndex> span = generated_submonoid(g, gens);
    for (ElementIndex x = 0; x < n; ++x)
        if (!std::binary_search(span.begin(), span.end(), x)) {
            gens.push_back(x);
            span = generated_submonoid(g, gens);
        }
    const std::size_t r = gens.size();
    if (r == 0) return {};
    std::vector<std::optional<std::vector<long long>>> word(n);
    word[g.zero()] = std::vector<long long>(r, 0);
    std::vector<ElementIndex> queue{g.zero()};
    for (std::size_t i = 0; i < queue.size(); ++i)
        for (std::size_t j = 0; j < r; ++j) {
            const ElementIndex y = g.add(queue[i], gens[j]);
            if (word[y]) continue;
            word[y] = *word[queue[i]];
            ++(*word[y])[j];
            queue.push_back(y);
        }
    // Columns are relations; the group is the cokernel.
    IntegerMatrix rel(r, n * r);
    std::size_t col = 0;
    for (ElementIndex x = 0; x < n; ++x)
        for (std::size_t j = 0; j < r; ++j, ++col) {
            const auto& from = *word[x];
            const auto& to = *word[g.add(x, gens[j])];
            for (std::size_t i = 0; i < r; ++i) rel(i, col) = from[i] + (i == j ? 1 : 0) - to[i];
        }
    return cokernel(rel);
}

/// M^+ is the group of the smallest ideal.
inline AbelianGroupInvariants group_completion(const FiniteCommMonoid& m) {
    return group_invariants_by_orders(smallest_ideal(m).group);
}

// ---------------------------------------------------------------------------
// Constructions

/// M / ~_I where a ~_I b iff a + i = b + j for some i, j in I.
inline FiniteCommMonoid quotient_by_submonoid(const FiniteCommMonoid& m, std::vector<ElementIndex> sub) {
    std::sort(sub.begin(), sub.end());
    sub.erase(std::unique(sub.begin(), sub.end()), sub.end());
    for (ElementIndex x : sub)
        if (x >= m.size()) detail::fail(ErrorKind::NotSubmonoid, "element index out of range");
    if (!std::binary_search(sub.begin(), sub.end(), m.zero()))
        detail::fail(ErrorKind::NotSubmonoid, "does not contain zero");
    for (ElementIndex a : sub)
        for (ElementIndex b : sub)
            if (!std::binary_search(sub.begin(), sub.end(), m.add(a, b)))
                detail::fail(ErrorKind::NotSubmonoid, "not closed: " + m.label(a) + " + " + m.label(b));

    std::vector<ElementIndex> parent(m.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<ElementIndex(ElementIndex)> root = [&](ElementIndex x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (ElementIndex a = 0; a < m.size(); ++a)
        for (ElementIndex i : sub) {
            const ElementIndex ra = root(a);
            const ElementIndex rb = root(m.add(a, i));
            if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
        }
    std::vector<ElementIndex> cls(m.size());
    std::vector<ElementIndex> leaders;
    std::vector<std::size_t> leader_pos(m.size(), m.size());
    for (ElementIndex a = 0; a < m.size(); ++a) {
        const ElementIndex r = root(a);
        if (leader_pos[r] == m.size()) {
            leader_pos[r] = leaders.size();
            leaders.push_back(a);
        }
        cls[a] = leader_pos[r];
    }
    const std::size_t k = leaders.size();
    std::vector<ElementIndex> table(k * k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) table[i * k + j] = cls[m.add(leaders[i], leaders[j])];
    // ~_I is a congruence: every pair of members must add into one class.
    for (ElementIndex a = 0; a < m.size(); ++a)
        for (ElementIndex b = 0; b < m.size(); ++b)
            detail::ensure(cls[m.add(a, b)] == table[cls[a] * k + cls[b]], "quotient relation is not a congruence");
    std::vector<std::string> labels;
    std::vector<Configuration> reps;
    for (ElementIndex a : leaders) {
        labels.push_back(m.label(a));
        if (m.has_representatives()) reps.push_back(m.representatives()[a]);
    }
    std::vector<ElementIndex> gens;
    for (ElementIndex g : m.generators()) gens.push_back(cls[g]);
    const ElementIndex zero = cls[m.zero()];
    return FiniteCommMonoid(std::move(labels), zero, std::move(table), detail::dedup_nonzero(std::move(gens), zero),
                            std::move(reps));
}

namespace detail {

inline std::string multiple_label(std::size_t i, const std::string& x) {
    if (i == 0) return "0";
    if (i == 1) return x;
    return std::to_string(i) + x;
}

}  // namespace detail

/// M_{n,n+k}: generated by x with (n+k)x = nx.
inline FiniteCommMonoid make_Mnk(std::size_t n, std::size_t k) {
    if (n < 1 || k < 1) detail::fail(ErrorKind::BadParameters, "make_Mnk needs n >= 1 and k >= 1");
    const std::size_t size = n + k;
    std::vector<std::string> labels;
    std::vector<ElementIndex> table(size * size);
    for (std::size_t i = 0; i < size; ++i) {
        labels.push_back(detail::multiple_label(i, "x"));
        for (std::size_t j = 0; j < size; ++j) {
            const std::size_t s = i + j;
            table[i * size + j] = s < size ? s : n + (s - n) % k;
        }
    }
    return FiniteCommMonoid(std::move(labels), 0, std::move(table), {1});
}

/// C_n = M_{1,n}.
inline FiniteCommMonoid make_Cn(std::size_t n) {
    if (n < 2) detail::fail(ErrorKind::BadParameters, "make_Cn needs n >= 2");
    return make_Mnk(1, n - 1);
}

/// The cyclic group Z_n as a monoid.
inline FiniteCommMonoid make_Zn(std::size_t n) {
    if (n < 1) detail::fail(ErrorKind::BadParameters, "make_Zn needs n >= 1");
    std::vector<std::string> labels;
    std::vector<ElementIndex> table(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        labels.push_back(detail::multiple_label(i, "x"));
        for (std::size_t j = 0; j < n; ++j) table[i * n + j] = (i + j) % n;
    }
    return FiniteCommMonoid(std::move(labels), 0, std::move(table), n > 1 ? std::vector<ElementIndex>{1} : std::vector<ElementIndex>{});
}

inline FiniteCommMonoid direct_sum(const FiniteCommMonoid& a, const FiniteCommMonoid& b) {
    const std::size_t na = a.size();
    const std::size_t nb = b.size();
    const std::size_t n = na * nb;
    detail::check_table_size(n);
    auto id = [nb](ElementIndex i, ElementIndex j) { return i * nb + j; };
    std::vector<std::string> labels(n);
    std::vector<ElementIndex> table(n * n);
    for (ElementIndex i = 0; i < na; ++i)
        for (ElementIndex j = 0; j < nb; ++j) {
            labels[id(i, j)] = "(" + a.label(i) + "," + b.label(j) + ")";
            for (ElementIndex k = 0; k < na; ++k)
                for (ElementIndex l = 0; l < nb; ++l) table[id(i, j) * n + id(k, l)] = id(a.add(i, k), b.add(j, l));
        }
    std::vector<ElementIndex> gens;
    for (ElementIndex g : a.generators()) gens.push_back(id(g, b.zero()));
    for (ElementIndex g : b.generators()) gens.push_back(id(a.zero(), g));
    const ElementIndex zero = id(a.zero(), b.zero());
    return FiniteCommMonoid(std::move(labels), zero, std::move(table), detail::dedup_nonzero(std::move(gens), zero));
}

// ---------------------------------------------------------------------------
// Isomorphism

namespace detail {

struct ElementProfile {
    std::size_t index = 0;   // first k with kx repeating an earlier multiple
    std::size_t period = 0;
    std::size_t decompositions = 0;
    bool unit = false;
    bool atom = false;
    bool idempotent = false;

    auto operator<=>(const ElementProfile&) const = default;
};

inline std::vector<ElementProfile> profiles(const FiniteCommMonoid& m) {
    const std::size_t n = m.size();
    std::vector<ElementProfile> out(n);
    const auto us = units(m);
    const auto as = atoms(m);
    for (ElementIndex x : us) out[x].unit = true;
    for (ElementIndex x : as) out[x].atom = true;
    for (ElementIndex a = 0; a < n; ++a)
        for (ElementIndex b = 0; b < n; ++b) ++out[m.add(a, b)].decompositions;
    std::vector<std::size_t> first(n);
    for (ElementIndex x = 0; x < n; ++x) {
        out[x].idempotent = m.add(x, x) == x;
        std::fill(first.begin(), first.end(), 0);
        ElementIndex y = m.zero();
        for (std::size_t k = 1;; ++k) {
            y = m.add(y, x);
            if (first[y]) {
                out[x].index = first[y];
                out[x].period = k - first[y];
                break;
            }
            first[y] = k;
        }
    }
    return out;
}

class IsomorphismSearch {
public:
    IsomorphismSearch(const FiniteCommMonoid& a, const FiniteCommMonoid& b)
        : a_(a), b_(b), pa_(profiles(a)), pb_(profiles(b)), phi_(a.size(), kNone), inv_(b.size(), kNone) {}

    std::optional<std::vector<ElementIndex>> run() {
        auto sa = pa_;
        auto sb = pb_;
        std::sort(sa.begin(), sa.end());
        std::sort(sb.begin(), sb.end());
        if (sa != sb) return std::nullopt;

        // Greedy generating set, rarest profiles first.
        std::map<ElementProfile, std::size_t> freq;
        for (const auto& p : pa_) ++freq[p];
        std::vector<ElementIndex> order(a_.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](ElementIndex x, ElementIndex y) {
            return std::pair(freq[pa_[x]], pa_[x].decompositions) < std::pair(freq[pa_[y]], pa_[y].decompositions);
        });
        std::vector<ElementIndex> span{a_.zero()};
        for (ElementIndex x : order) {
            if (std::binary_search(span.begin(), span.end(), x)) continue;
            gens_.push_back(x);
            span = generated_submonoid(a_, gens_);
        }
        if (!set(a_.zero(), b_.zero())) return std::nullopt;
        domain_.push_back(a_.zero());
        if (!extend(0)) return std::nullopt;
        return phi_;
    }

private:
    static constexpr ElementIndex kNone = static_cast<ElementIndex>(-1);

    bool set(ElementIndex x, ElementIndex y) {
        if (pa_[x] != pb_[y] || inv_[y] != kNone) return false;
        phi_[x] = y;
        inv_[y] = x;
        return true;
    }

    void undo(std::size_t domain_size) {
        while (domain_.size() > domain_size) {
            inv_[phi_[domain_.back()]] = kNone;
            phi_[domain_.back()] = kNone;
            domain_.pop_back();
        }
    }

    /// Closes the partial map under adding the first `assigned` generators.
    bool propagate(std::size_t assigned) {
        for (std::size_t i = 0; i < domain_.size(); ++i) {
            const ElementIndex x = domain_[i];
            for (std::size_t j = 0; j < assigned; ++j) {
                const ElementIndex g = gens_[j];
                const ElementIndex z = a_.add(x, g);
                const ElementIndex image = b_.add(phi_[x], phi_[g]);
                if (phi_[z] == kNone) {
                    if (!set(z, image)) return false;
                    domain_.push_back(z);
                } else if (phi_[z] != image) {
                    return false;
                }
            }
        }
        return true;
    }

    bool extend(std::size_t k) {
        if (k == gens_.size()) return domain_.size() == a_.size() && verify();
        const ElementIndex g = gens_[k];
        if (phi_[g] != kNone) {
            // Already forced by earlier generators.
            const std::size_t mark = domain_.size();
            if (propagate(k + 1) && extend(k + 1)) return true;
            undo(mark);
            return false;
        }
        for (ElementIndex y = 0; y < b_.size(); ++y) {
            if (inv_[y] != kNone || pb_[y] != pa_[g]) continue;
            const std::size_t mark = domain_.size();
            set(g, y);
            domain_.push_back(g);
            if (propagate(k + 1) && extend(k + 1)) return true;
            undo(mark);
        }
        return false;
    }

    bool verify() const {
        for (ElementIndex x = 0; x < a_.size(); ++x)
            for (ElementIndex y = 0; y < a_.size(); ++y)
                if (phi_[a_.add(x, y)] != b_.add(phi_[x], phi_[y])) return false;
        return true;
    }

    const FiniteCommMonoid& a_;
    const FiniteCommMonoid& b_;
    std::vector<ElementProfile> pa_;
    std::vector<ElementProfile> pb_;
    std::vector<ElementIndex> phi_;
    std::vector<ElementIndex> inv_;
    std::vector<ElementIndex> gens_;
    std::vector<ElementIndex> domain_;
};

}  // namespace detail

/// A verified isomorphism a -> b (phi[i] is the image of element i), or
/// nullopt when none exists.  The search is exhaustive.
inline std::optional<std::vector<ElementIndex>> monoid_isomorphic(const FiniteCommMonoid& a, const FiniteCommMonoid& b,
                                                                  std::size_t cap = kDefaultIsomorphismCap) {
    if (a.size() > cap || b.size() > cap)
        detail::fail(ErrorKind::SizeOverBudget, "isomorphism test beyond |M| = " + std::to_string(cap));
    if (a.size() != b.size()) return std::nullopt;
    auto phi = detail::IsomorphismSearch(a, b).run();
    if (phi) {
        std::vector<bool> hit(b.size(), false);
        for (ElementIndex y : *phi) {
            detail::ensure(y < b.size() && !hit[y], "isomorphism is not a bijection");
            hit[y] = true;
        }
        for (ElementIndex x = 0; x < a.size(); ++x)
            for (ElementIndex y = 0; y < a.size(); ++y)
                detail::ensure((*phi)[a.add(x, y)] == b.add((*phi)[x], (*phi)[y]), "isomorphism is not additive");
    }
    return phi;
}

namespace detail {

inline void factorizations(std::size_t n, std::size_t parts, std::size_t min_factor, std::vector<std::size_t>& cur,
                           std::vector<std::vector<std::size_t>>& out) {
    if (parts == 0) {
        if (n == 1) out.push_back(cur);
        return;
    }
    for (std::size_t f = min_factor; f <= n; ++f) {
        if (n % f) continue;
        cur.push_back(f);
        factorizations(n / f, parts - 1, f, cur, out);
        cur.pop_back();
    }
}

}  // namespace detail

/// [n1, ..., nt] (ascending, each >= 2) with M isomorphic to C_n1 + ... + C_nt,
/// or nullopt.  The trivial monoid gives the empty list.
inline std::optional<std::vector<std::size_t>> classify_cyclic_sum(const FiniteCommMonoid& m,
                                                                   std::size_t cap = kDefaultIsomorphismCap) {
    // C_n has exactly two idempotents, so the sum has 2^t.
    std::size_t idem = idempotents(m).size();
    std::size_t t = 0;
    while (idem > 1 && idem % 2 == 0) {
        idem /= 2;
        ++t;
    }
    if (idem != 1) return std::nullopt;
    if (t == 0) return m.size() == 1 ? std::optional<std::vector<std::size_t>>(std::vector<std::size_t>{}) : std::nullopt;
    if (!is_conical(m)) return std::nullopt;
    const auto completion = group_completion(m);
    std::vector<std::vector<std::size_t>> candidates;
    std::vector<std::size_t> cur;
    detail::factorizations(m.size(), t, 2, cur, candidates);
    for (const auto& ns : candidates) {
        std::vector<BigInt> moduli;
        for (std::size_t k : ns) moduli.emplace_back(k - 1);
        if (invariants_from_moduli(moduli) != completion) continue;
        FiniteCommMonoid sum = make_Cn(ns.front());
        for (std::size_t i = 1; i < ns.size(); ++i) sum = direct_sum(sum, make_Cn(ns[i]));
        if (monoid_isomorphic(m, sum, cap)) return ns;
    }
    return std::nullopt;
}

}  // namespace sandk
