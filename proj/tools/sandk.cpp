#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "report.hpp"
#include "sandk/sandk.hpp"

namespace {

using namespace sandk;
using sandk::cli::ordered_json;

struct Options {
    std::string path;
    bool json = false;
    std::size_t budget = kDefaultBudget;
    std::optional<std::size_t> cap;
    std::optional<std::uint64_t> seed;
    std::string config;
    bool sink_absorbing = false;
    bool weighted = false;
    bool sandpile = false;
    std::string variant = "without";
    std::string golden;
    std::string weights;
};

/// Thrown for unreadable input; maps to exit code 2.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::size_t default_budget() {
    if (const char* env = std::getenv("SANDK_BUDGET")) {
        if (auto v = detail::parse_u64(env); v && *v > 0) return *v;
        std::cerr << "warning: ignoring invalid SANDK_BUDGET='" << env << "'\n";
    }
    return kDefaultBudget;
}

GraphFile load(const Options& o) {
    if (!std::filesystem::exists(o.path)) throw InputError("cannot open '" + o.path + "'");
    return read_graph_file(o.path);
}

SandpileGraph load_sandpile(const Options& o) {
    auto file = load(o);
    return validate_sandpile(file.graph, file.sink_hint ? std::optional<std::string_view>(*file.sink_hint)
                                                        : std::nullopt);
}

void emit(const ordered_json& j) { std::cout << j.dump(2) << '\n'; }

std::string join(const std::vector<std::string>& xs, std::string_view sep = ", ") {
    std::string out;
    for (const auto& x : xs) {
        if (!out.empty()) out += sep;
        out += x;
    }
    return out;
}

std::vector<std::string> labels_of(const FiniteCommMonoid& m, const std::vector<ElementIndex>& xs) {
    std::vector<std::string> out;
    for (ElementIndex x : xs) out.push_back(m.label(x));
    return out;
}

std::string cyclic_sum_text(const std::optional<std::vector<std::size_t>>& cs) {
    if (!cs) return "none";
    if (cs->empty()) return "trivial";
    std::vector<std::string> parts;
    for (std::size_t n : *cs) parts.push_back("C" + std::to_string(n));
    return join(parts, " + ");
}

int run_check(const Options& o) {
    auto file = load(o);
    const auto& g = file.graph;
    if (o.weighted) {
        std::vector<std::string> sinks;
        for (VertexIndex v : g.sinks()) sinks.push_back(g.name(v));
        if (o.json) {
            emit({{"report", "check"},
                  {"vertices", g.vertex_count()},
                  {"edges", g.edge_count()},
                  {"vertex_weighted", g.is_vertex_weighted()},
                  {"balanced", g.is_balanced()},
                  {"sinks", sinks}});
        } else {
            std::cout << "weighted graph; vertices=" << g.vertex_count() << "; edges=" << g.edge_count()
                      << "; vertex-weighted=" << (g.is_vertex_weighted() ? "yes" : "no")
                      << "; balanced=" << (g.is_balanced() ? "yes" : "no") << "; sinks=" << join(sinks, ",") << '\n';
        }
        return 0;
    }
    const auto sg = validate_sandpile(g, file.sink_hint ? std::optional<std::string_view>(*file.sink_hint)
                                                        : std::nullopt);
    const bool reduced = is_reduced(sg.graph());
    if (o.json) {
        emit({{"report", "check"},
              {"valid", true},
              {"sink", sg.name(sg.sink())},
              {"reduced", reduced},
              {"vertices", sg.vertex_count()},
              {"edges", sg.graph().edge_count()}});
    } else {
        std::cout << "valid sandpile graph; sink=" << sg.name(sg.sink()) << "; reduced=" << (reduced ? "yes" : "no")
                  << '\n';
    }
    return 0;
}

void print_trace(const WeightedDigraph& g, const StabilizationTrace& t) {
    std::cout << "result: " << format_configuration(g, t.result) << '\n';
    std::cout << "odometer: " << format_configuration(g, Configuration(t.odometer)) << '\n';
    std::cout << "steps: " << t.steps << '\n';
}

int run_stabilize(const Options& o) {
    if (o.weighted) {
        auto file = load(o);
        const auto& g = file.graph;
        const auto c = parse_configuration(g, o.config);
        try {
            const auto t = stabilize_weighted(g, c, o.budget);
            if (o.json) {
                auto j = cli::trace_json(g, t);
                j["report"] = "stabilize";
                j["status"] = "stable";
                emit(j);
            } else {
                print_trace(g, t);
            }
            return 0;
        } catch (const BudgetExhausted& e) {
            if (o.json) {
                auto j = cli::trace_json(g, e.partial());
                j["report"] = "stabilize";
                j["status"] = "budget_exhausted";
                emit(j);
            } else {
                std::cout << "partial trace (budget " << o.budget << " exhausted)\n";
                print_trace(g, e.partial());
            }
            throw;
        }
    }
    const auto sg = load_sandpile(o);
    const auto c = parse_configuration(sg.graph(), o.config);
    StabilizationTrace t;
    if (o.seed) {
        std::mt19937_64 rng(*o.seed);
        t = stabilize_with(sg, c, o.sink_absorbing, [&](std::span<const VertexIndex> unstable) {
            return unstable[std::uniform_int_distribution<std::size_t>(0, unstable.size() - 1)(rng)];
        });
    } else {
        t = stabilize(sg, c, o.sink_absorbing);
    }
    if (o.json) {
        auto j = cli::trace_json(sg.graph(), t);
        j["report"] = "stabilize";
        j["status"] = "stable";
        emit(j);
    } else {
        print_trace(sg.graph(), t);
    }
    return 0;
}

void print_monoid(const FiniteCommMonoid& m, std::size_t iso_cap) {
    const auto ref = check_refinement(m);
    const auto ideal = smallest_ideal(m);
    std::cout << "size: " << m.size() << '\n';
    if (m.size() <= 64) std::cout << "elements: " << join(m.labels()) << '\n';
    std::cout << "generators: " << join(labels_of(m, m.generators())) << '\n';
    std::cout << "units: " << join(labels_of(m, units(m))) << '\n';
    std::cout << "conical: " << (is_conical(m) ? "yes" : "no") << '\n';
    std::cout << "atoms: " << join(labels_of(m, atoms(m))) << '\n';
    std::cout << "refinement: " << (ref.refinement ? "yes" : "no");
    if (ref.counterexample) {
        const auto& w = *ref.counterexample;
        std::cout << " (" << m.label(w[0]) << " + " << m.label(w[1]) << " = " << m.label(w[2]) << " + "
                  << m.label(w[3]) << " has no refinement)";
    }
    std::cout << '\n';
    std::cout << "atom-cancellative: " << (is_atom_cancellative(m) ? "yes" : "no") << '\n';
    std::cout << "smallest ideal: " << ideal.elements.size() << " elements, identity " << m.label(ideal.identity)
              << '\n';
    std::cout << "group completion: " << group_invariants_by_orders(ideal.group).to_string() << '\n';
    if (m.size() <= iso_cap) std::cout << "cyclic sum: " << cyclic_sum_text(classify_cyclic_sum(m, iso_cap)) << '\n';
}

int run_monoid(const Options& o) {
    const auto sg = load_sandpile(o);
    const auto m = enumerate_sandpile_monoid(sg, o.cap.value_or(kDefaultSandpileCap));
    if (o.json) {
        auto j = cli::monoid_json(m, kDefaultIsomorphismCap);
        j["report"] = "monoid";
        emit(j);
    } else {
        print_monoid(m, kDefaultIsomorphismCap);
    }
    return 0;
}

MonoidVariant parse_variant(const std::string& v) {
    return v == "with" ? MonoidVariant::WithSinkRelations : MonoidVariant::NoSinkRelations;
}

int run_wmonoid(const Options& o) {
    auto file = load(o);
    const auto& g = file.graph;
    const EnumerationCaps caps{o.cap.value_or(kDefaultWeightedCap), o.budget};
    try {
        const auto m = enumerate_weighted_monoid(g, parse_variant(o.variant), caps);
        if (o.json) {
            auto j = cli::monoid_json(m, kDefaultIsomorphismCap);
            j["report"] = "wmonoid";
            j["variant"] = o.variant;
            emit(j);
        } else {
            print_monoid(m, kDefaultIsomorphismCap);
        }
        return 0;
    } catch (const Inconclusive& e) {
        std::string advisory;
        if (g.is_vertex_weighted() && k0_of_weighted_graph(g).free_rank > 0)
            advisory = "K0 has positive free rank (advisory only)";
        if (o.json) {
            emit({{"report", "wmonoid"},
                  {"variant", o.variant},
                  {"status", "inconclusive"},
                  {"partial_elements", e.partial_elements().size()},
                  {"advisory", advisory}});
        } else if (!advisory.empty()) {
            std::cout << "note: " << advisory << '\n';
        }
        throw;
    }
}

int run_group(const Options& o) {
    const auto sg = load_sandpile(o);
    const auto m = enumerate_sandpile_monoid(sg, o.cap.value_or(kDefaultSandpileCap));
    const auto ideal = smallest_ideal(m);
    const auto by_orders = group_invariants_by_orders(ideal.group);
    const auto by_relations = group_invariants_by_relations(ideal.group);
    const bool conical = conicality_witnesses(sg).empty();
    std::optional<AbelianGroupInvariants> k0;
    if (conical) k0 = sandpile_group_via_k0(sg);
    const bool agree = by_orders == by_relations && (!k0 || *k0 == by_orders);
    if (o.json) {
        emit({{"report", "group"},
              {"order", ideal.elements.size()},
              {"by_orders", cli::invariants_json(by_orders)},
              {"by_relations", cli::invariants_json(by_relations)},
              {"k0", k0 ? cli::invariants_json(*k0) : ordered_json(nullptr)},
              {"agree", agree}});
    } else {
        std::cout << "G(E) = " << by_orders.to_string() << " (order " << ideal.elements.size() << ")\n";
        std::cout << "relation matrix route: " << by_relations.to_string() << '\n';
        std::cout << "K0 route: " << (k0 ? k0->to_string() : std::string("n/a (not conical)")) << '\n';
        std::cout << "agree: " << (agree ? "yes" : "no") << '\n';
    }
    return agree ? 0 : 1;
}

int run_k0(const Options& o) {
    auto file = load(o);
    WeightedDigraph g = file.graph;
    if (o.sandpile) {
        const auto sg = validate_sandpile(g, file.sink_hint ? std::optional<std::string_view>(*file.sink_hint)
                                                            : std::nullopt);
        if (const auto w = conicality_witnesses(sg); !w.empty())
            detail::fail(ErrorKind::NotConical, "vertices of S that are not irrelevant: " + join_names(sg.graph(), w));
        g = quotient_graph(sg.graph(), non_cycle_vertices(sg.graph()));
    }
    const auto k = k0_matrix(g);
    const auto diag = smith_diagonal(k);
    const auto inv = cokernel(k);
    if (o.json) {
        ordered_json d = ordered_json::array();
        for (const auto& x : diag) d.push_back(cli::big_to_json(x));
        emit({{"report", "k0"},
              {"rows", k.rows()},
              {"cols", k.cols()},
              {"matrix", cli::matrix_json(k)},
              {"snf_diagonal", d},
              {"invariants", cli::invariants_json(inv)}});
    } else {
        std::cout << "matrix (" << k.rows() << "x" << k.cols() << "):\n" << k.to_string();
        std::cout << "snf diagonal:";
        for (const auto& x : diag) std::cout << ' ' << x;
        std::cout << "\nK0 = " << inv.to_string() << '\n';
    }
    return 0;
}

int run_realize(const Options& o) {
    const auto sg = load_sandpile(o);
    const auto r = realization(sg, o.cap.value_or(kDefaultSandpileCap), EnumerationCaps{kDefaultWeightedCap, o.budget});
    const auto j = cli::realization_json(sg, r);
    if (!o.golden.empty()) {
        if (std::filesystem::exists(o.golden)) {
            std::ifstream in(o.golden);
            ordered_json expected;
            try {
                expected = ordered_json::parse(in);
            } catch (const nlohmann::json::parse_error& e) {
                throw InputError("golden file '" + o.golden + "' is not valid JSON");
            }
            if (expected != j) detail::fail(ErrorKind::GoldenMismatch, "report differs from '" + o.golden + "'");
        } else {
            std::ofstream out(o.golden);
            out << j.dump(2) << '\n';
            if (!out) throw InputError("cannot write '" + o.golden + "'");
        }
    }
    if (o.json) {
        emit(j);
    } else {
        std::cout << "S = {" << join_names(sg.graph(), r.s) << "}\n";
        std::cout << "conical: " << (r.conical ? "yes" : "no");
        if (!r.conical) std::cout << " (witnesses: " << join_names(sg.graph(), r.conicality_witnesses) << ")";
        std::cout << "\n|SP| = " << r.sp.size() << ", |M(E/S,w_r)| = " << r.weighted.size() << '\n';
        for (const auto& c : r.claims) std::cout << c.name << ": " << (c.holds ? "OK" : "FAILED") << " (" << c.detail << ")\n";
    }
    return r.ok() ? 0 : 1;
}

int run_classify(const Options& o) {
    std::optional<FiniteCommMonoid> m;
    if (o.weighted) {
        auto file = load(o);
        m = enumerate_weighted_monoid(file.graph, parse_variant(o.variant),
                                      EnumerationCaps{o.cap.value_or(kDefaultWeightedCap), o.budget});
    } else {
        m = enumerate_sandpile_monoid(load_sandpile(o), o.cap.value_or(kDefaultSandpileCap));
    }
    const auto cs = classify_cyclic_sum(*m);
    if (o.json) {
        emit({{"report", "classify"}, {"size", m->size()}, {"cyclic_sum", cs ? ordered_json(*cs) : ordered_json(nullptr)}});
    } else {
        std::cout << cyclic_sum_text(cs) << '\n';
    }
    return 0;
}

int run_prime(const Options& o) {
    const auto p = prime_classifier(load_sandpile(o));
    std::string text(prime_kind_name(p.kind));
    if (p.kind == PrimeClassification::Kind::ZpCase) text += "(" + std::to_string(p.p) + ")";
    if (p.kind == PrimeClassification::Kind::MCase)
        text += "(" + std::to_string(p.n) + "," + std::to_string(p.p) + ")";
    if (o.json) {
        emit({{"report", "prime"},
              {"kind", prime_kind_name(p.kind)},
              {"order", p.order},
              {"p", p.p},
              {"n", p.n},
              {"verified", p.verified}});
    } else {
        std::cout << text << "; |SP| = " << p.order;
        if (p.kind != PrimeClassification::Kind::NotPrimeOrder) std::cout << "; verified=" << (p.verified ? "yes" : "no");
        std::cout << '\n';
    }
    return p.kind == PrimeClassification::Kind::NotPrimeOrder || p.verified ? 0 : 1;
}

int run_cycle_suite(const Options& o) {
    std::vector<Weight> weights;
    std::stringstream in(o.weights);
    std::string item;
    while (std::getline(in, item, ',')) {
        auto w = detail::parse_u64(item);
        if (!w) detail::fail(ErrorKind::BadParameters, "bad weight '" + item + "'");
        weights.push_back(*w);
    }
    const auto r = weighted_cycle_suite(weights, EnumerationCaps{o.cap.value_or(kDefaultWeightedCap), o.budget});
    if (o.json) {
        emit({{"report", "cycle-suite"},
              {"weights", r.weights},
              {"n", r.n},
              {"weighted_size", r.weighted_size},
              {"companion_f_size", r.companion_f_size},
              {"sandpile_size", r.sandpile_size},
              {"weighted_iso", r.weighted_iso},
              {"companion_f_iso", r.companion_f_iso},
              {"sandpile_iso", r.sandpile_iso},
              {"ok", r.ok()}});
    } else {
        auto yn = [](bool b) { return b ? "OK" : "FAILED"; };
        std::cout << "N = " << r.n << '\n';
        std::cout << "M(E,w) ~= C" << r.n << ": " << yn(r.weighted_iso) << " (size " << r.weighted_size << ")\n";
        std::cout << "M(F) ~= C" << r.n << ": " << yn(r.companion_f_iso) << " (size " << r.companion_f_size << ")\n";
        std::cout << "SP(G) ~= C" << r.n << ": " << yn(r.sandpile_iso) << " (size " << r.sandpile_size << ")\n";
    }
    return r.ok() ? 0 : 1;
}

int run_export_dot(const Options& o) {
    std::cout << to_dot(load(o).graph);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sandpile monoids, graph monoids and their K-theory"};
    app.require_subcommand(1);
    Options o;
    o.budget = default_budget();

    auto add_graph = [&](CLI::App* sub) {
        sub->add_option("graph", o.path, "graph file")->required();
        sub->add_flag("--json", o.json, "emit a JSON report");
    };
    auto add_budget = [&](CLI::App* sub) {
        sub->add_option("--budget", o.budget, "rewrite step budget")->check(CLI::PositiveNumber);
    };
    auto add_cap = [&](CLI::App* sub) {
        sub->add_option("--cap", o.cap, "element cap")->check(CLI::PositiveNumber);
    };

    auto* check = app.add_subcommand("check", "validate a graph file");
    add_graph(check);
    check->add_flag("--weighted", o.weighted, "report weighted-graph properties instead");

    auto* stab = app.add_subcommand("stabilize", "stabilize a configuration");
    add_graph(stab);
    add_budget(stab);
    stab->add_option("--config", o.config, "configuration, e.g. x=5,s=0")->required();
    stab->add_flag("--sink-absorbing", o.sink_absorbing, "empty the sink after every toppling");
    stab->add_flag("--weighted", o.weighted, "arbitrary vertex-weighted graph (budgeted)");
    stab->add_option("--seed", o.seed, "random toppling order from this seed");

    auto* mon = app.add_subcommand("monoid", "sandpile monoid report");
    add_graph(mon);
    add_cap(mon);

    auto* wmon = app.add_subcommand("wmonoid", "graph monoid of a vertex-weighted graph");
    add_graph(wmon);
    add_cap(wmon);
    add_budget(wmon);
    wmon->add_option("--variant", o.variant, "with | without sink relations")
        ->check(CLI::IsMember({"with", "without"}));

    auto* grp = app.add_subcommand("group", "sandpile group by three routes");
    add_graph(grp);
    add_cap(grp);

    auto* k0 = app.add_subcommand("k0", "K0 via Smith normal form");
    add_graph(k0);
    k0->add_flag("--sandpile", o.sandpile, "use (E/S, w_r) of a sandpile graph");

    auto* real = app.add_subcommand("realize", "realization certificate");
    add_graph(real);
    add_cap(real);
    add_budget(real);
    real->add_option("--golden", o.golden, "write, or compare against, a golden report");

    auto* cls = app.add_subcommand("classify", "direct sum of cyclic monoids C_n");
    add_graph(cls);
    add_cap(cls);
    add_budget(cls);
    cls->add_flag("--weighted", o.weighted, "classify the graph monoid instead of SP");
    cls->add_option("--variant", o.variant, "with | without sink relations")->check(CLI::IsMember({"with", "without"}));

    auto* prime = app.add_subcommand("prime", "prime-order classification");
    add_graph(prime);

    auto* suite = app.add_subcommand("cycle-suite", "weighted cycle isomorphisms");
    suite->add_option("--weights", o.weights, "comma-separated weights, e.g. 2,2,1")->required();
    suite->add_flag("--json", o.json, "emit a JSON report");
    add_cap(suite);
    add_budget(suite);

    auto* dot = app.add_subcommand("export-dot", "DOT export");
    dot->add_option("graph", o.path, "graph file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*check) return run_check(o);
        if (*stab) return run_stabilize(o);
        if (*mon) return run_monoid(o);
        if (*wmon) return run_wmonoid(o);
        if (*grp) return run_group(o);
        if (*k0) return run_k0(o);
        if (*real) return run_realize(o);
        if (*cls) return run_classify(o);
        if (*prime) return run_prime(o);
        if (*suite) return run_cycle_suite(o);
        if (*dot) return run_export_dot(o);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.kind() == ErrorKind::ParseError ? 2 : 1;
    }
    return 2;
}
