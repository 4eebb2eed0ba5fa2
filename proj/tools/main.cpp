// Command-line front end: simulate traces, run estimators, drive
// experiment sweeps, print the closed-form observation bounds and
// generate geometric topologies.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "confgraph/direct.hpp"
#include "confgraph/experiment.hpp"
#include "confgraph/geo.hpp"
#include "confgraph/hidden.hpp"
#include "confgraph/sim.hpp"
#include "confgraph/theory.hpp"
#include "confgraph/trace.hpp"

using namespace confgraph;

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void emit(const std::string& out, const std::string& text) {
    if (out.empty() || out == "-") std::cout << text;
    else write_file(out, text);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Interference graph simulation and passive estimation"};
    app.require_subcommand(1);
    app.fallthrough();

    std::uint64_t seed = 1;
    int workers = 0;
    app.add_option("--seed", seed, "master seed");
    app.add_option("--workers", workers, "OpenMP worker count (0 = library default)");

    // ---- simulate ----
    auto* sim = app.add_subcommand("simulate", "sample a session trace from a graph");
    std::string sim_graph, sim_family = "", sim_out = "-", sim_traffic = "bernoulli";
    std::string sim_topology, sim_channel = "static";
    int fam_n = 20, fam_d = 6, fam_s = 2;
    double sim_p = 0.5, sim_w = 1.0, sim_pmin = 0.5;
    std::uint64_t sim_k = 1000;
    sim->add_option("--graph", sim_graph, "graph text file");
    sim->add_option("--topology", sim_topology,
                    "topology csv; derives the graph and per-AP traffic");
    sim->add_option("--channel", sim_channel, "static | random (with --topology)");
    sim->add_option("--family", sim_family, "clique | group (instead of --graph)");
    sim->add_option("--family-n", fam_n);
    sim->add_option("--family-d", fam_d);
    sim->add_option("--family-s", fam_s);
    sim->add_option("--k", sim_k, "session count");
    sim->add_option("--p", sim_p, "traffic probability");
    sim->add_option("--w", sim_w, "backoff window");
    sim->add_option("--p-min", sim_pmin, "weight floor for generated families");
    sim->add_option("--traffic", sim_traffic, "bernoulli | queued");
    sim->add_option("--out", sim_out, "output path (.csv or .bin; - for stdout csv)");

    // ---- estimate ----
    auto* est = app.add_subcommand("estimate", "run an estimator over a recorded trace");
    std::string est_trace, est_kind = "direct-static", est_out = "-", est_direct;
    double est_eps = 0.01, est_pmin = 0.5, est_pfade = 0.0;
    int est_scap = 1;
    est->add_option("--trace", est_trace, "trace file (.csv or .bin)")->required();
    est->add_option("--kind", est_kind,
                    "direct-static | direct-robust | hidden-static | hidden-s1 | hidden-robust");
    est->add_option("--epsilon", est_eps, "co-occurrence threshold (robust kinds)");
    est->add_option("--s-cap", est_scap, "hitting-set / screening-set size cap");
    est->add_option("--p-min", est_pmin, "weight floor (hidden-robust threshold)");
    est->add_option("--p-fade", est_pfade, "fade bound (hidden-robust threshold)");
    est->add_option("--direct", est_direct, "graph file with a precomputed direct estimate");
    est->add_option("--out", est_out, "output path (- for stdout)");

    // ---- experiment ----
    auto* exp = app.add_subcommand("experiment", "run a config-driven recovery-time sweep");
    std::string exp_config, exp_out;
    bool exp_seed_set = false;
    exp->add_option("--config", exp_config, "key=value config file")->required();
    exp->add_option("--out", exp_out, "output directory (overrides config)");
    exp->add_flag("--override-seed", exp_seed_set, "use --seed instead of the config seed");

    // ---- bounds ----
    auto* bnd = app.add_subcommand("bounds", "print the six observation bounds as CSV");
    BoundInputs bi;
    bi.n = 20;
    bi.d = 5;
    bi.s = 2;
    bi.p = 0.5;
    bi.p_min = 0.5;
    bi.p_fade = 0.0;
    bi.delta = 0.05;
    bi.gamma = 0.05;
    bi.alpha_tsybakov = 0.1;
    bi.q_low = 0.0;
    bi.q_up = 1.0;
    bi.c3 = 2.0;
    bi.c1 = 0.25;
    bi.c2 = 0.05;
    std::string bnd_out = "-";
    bnd->add_option("--n", bi.n);
    bnd->add_option("--d", bi.d);
    bnd->add_option("--s", bi.s);
    bnd->add_option("--p", bi.p);
    bnd->add_option("--p-min", bi.p_min);
    bnd->add_option("--p-fade", bi.p_fade);
    bnd->add_option("--q-low", bi.q_low);
    bnd->add_option("--q-up", bi.q_up);
    bnd->add_option("--c3", bi.c3);
    bnd->add_option("--delta", bi.delta);
    bnd->add_option("--gamma", bi.gamma);
    bnd->add_option("--alpha", bi.alpha_tsybakov);
    bnd->add_option("--c1", bi.c1);
    bnd->add_option("--c2", bi.c2);
    bnd->add_option("--out", bnd_out);

    // ---- gen-topology ----
    auto* gen = app.add_subcommand("gen-topology", "generate a grid deployment");
    int g_rows = 4, g_cols = 7, g_clients = 3;
    double g_cell = 50.0, g_range = 70.0;
    std::optional<double> g_int_thr;
    std::string g_out = "-", g_graph_out, g_mode = "static";
    gen->add_option("--rows", g_rows);
    gen->add_option("--cols", g_cols);
    gen->add_option("--cell-side", g_cell);
    gen->add_option("--clients-per-cell", g_clients);
    gen->add_option("--cs-range", g_range);
    gen->add_option("--int-threshold", g_int_thr, "client interference threshold (dBm)");
    gen->add_option("--out", g_out, "topology csv path");
    gen->add_option("--graph-out", g_graph_out, "also derive and write the ground-truth graph");
    gen->add_option("--channel", g_mode, "static | random (for --graph-out)");

    CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
    if (workers > 0) omp_set_num_threads(workers);
#endif

    try {
        if (*sim) {
            TrafficSpec traffic;
            if (sim_traffic == "queued") traffic.mode = TrafficSpec::Mode::queued;
            InterferenceGraph graph = [&] {
                if (!sim_topology.empty()) {
                    const auto topo = topology_from_csv(read_text_file(sim_topology));
                    const auto mode = sim_channel == "random" ? ChannelMode::random_channel
                                                              : ChannelMode::static_channel;
                    auto derived = derive_graph(topo, mode);
                    traffic.rate = traffic.mode == TrafficSpec::Mode::queued
                                       ? derived.arrival_rate
                                       : derived.bernoulli_intensity;
                    return derived.graph;
                }
                if (!sim_graph.empty()) return graph_from_text(read_text_file(sim_graph));
                if (sim_family == "clique") return gen_clique_family(fam_n, fam_d).base;
                if (sim_family == "group")
                    return gen_group_family(fam_n, fam_d, fam_s, sim_pmin,
                                            double(fam_d) / fam_n,
                                            double(std::max(1, fam_s - 1)) / fam_n)
                        .base;
                throw std::invalid_argument(
                    "simulate: need --graph, --topology or --family clique|group");
            }();
            ModelParams params = graph.params();
            params.p = sim_p;
            params.backoff_window = sim_w;
            const auto trace = sample_trace(graph, params, sim_k, seed, traffic);
            if (ends_with(sim_out, ".bin")) write_file(sim_out, trace_to_binary(trace));
            else emit(sim_out, trace_to_csv(trace));
        } else if (*est) {
            const SessionTrace trace = ends_with(est_trace, ".bin")
                                           ? trace_from_binary(read_binary_file(est_trace))
                                           : trace_from_csv(read_text_file(est_trace));
            EstimationResult result;
            result.n = trace.n();
            if (est_kind == "direct-static") {
                result.direct = estimate_direct_static(trace);
            } else if (est_kind == "direct-robust") {
                result.direct = estimate_direct_robust(trace, est_eps);
            } else if (est_kind == "hidden-s1") {
                result = estimate_hidden_s1(trace);
            } else {
                std::vector<NodePair> d_est;
                if (!est_direct.empty())
                    d_est = graph_from_text(read_text_file(est_direct)).direct_edges();
                else if (est_kind == "hidden-robust") d_est = estimate_direct_robust(trace, est_eps);
                else d_est = estimate_direct_static(trace);
                if (est_kind == "hidden-static") {
                    result = estimate_hidden_static(trace, d_est, est_scap);
                } else if (est_kind == "hidden-robust") {
                    ModelParams params;
                    params.channel = ChannelMode::random_channel;
                    params.p_min = est_pmin;
                    params.p_fade = est_pfade;
                    params.s = est_scap;
                    result = estimate_hidden_robust(trace, d_est, params);
                } else {
                    throw std::invalid_argument("estimate: unknown kind " + est_kind);
                }
                result.direct = d_est;
            }
            emit(est_out, estimation_to_text(result));
        } else if (*exp) {
            auto cfg = parse_experiment_config(read_text_file(exp_config));
            if (!exp_out.empty()) cfg.out_dir = exp_out;
            if (exp_seed_set) cfg.seed = seed;
            const auto res = run_experiment(cfg);
            std::cout << res.aggregate_json;
        } else if (*bnd) {
            emit(bnd_out, bounds_table_csv(bi));
        } else if (*gen) {
            const auto topo =
                gen_topology(g_rows, g_cols, g_cell, g_clients, PathLossParams{}, g_range, seed,
                             g_int_thr);
            emit(g_out, topology_to_csv(topo));
            if (!g_graph_out.empty()) {
                const auto mode = g_mode == "random" ? ChannelMode::random_channel
                                                     : ChannelMode::static_channel;
                const auto derived = derive_graph(topo, mode);
                write_file(g_graph_out, graph_to_text(derived.graph));
                for (const auto& f : derived.flags)
                    std::cerr << "note: node " << f.node << ": " << f.reason << "\n";
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
