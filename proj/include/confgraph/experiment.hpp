#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "confgraph/geo.hpp"
#include "confgraph/graph.hpp"
#include "confgraph/sim.hpp"

namespace confgraph {

enum class EstimatorKind { direct_static, direct_robust, hidden_static, hidden_robust };

struct RecoveryOutcome {
    std::uint64_t k = 0;   // first session count at which the estimate equals the truth
    bool censored = false; // never matched within max_k (k is then max_k)
    bool stable = true;    // no later checkpoint regressed after the first match
};

// Simulates sessions incrementally and reports the first k at which the
// estimator applied to the prefix equals the ground truth. The static
// direct estimator is monotone, so its result is exact; the other kinds
// are checked every check_interval sessions and keep being checked
// until max_k to fill in the stability bit.
RecoveryOutcome measure_recovery_time(const InterferenceGraph& truth, const ModelParams& params,
                                      EstimatorKind kind, std::uint64_t max_k,
                                      std::uint64_t check_interval, std::uint64_t seed,
                                      const TrafficSpec& traffic = {}, double epsilon = 0.0,
                                      int s_cap = 1);

// Keeps the candidates whose maximum direct degree and maximum hidden
// in-degree match the targets exactly.
struct FilterOutcome {
    std::vector<std::size_t> kept;
    double acceptance_rate = 0.0;
};
FilterOutcome topology_filter(const std::vector<DerivedGraph>& candidates, int target_d,
                              int target_s);

struct ExperimentConfig {
    enum class Kind { direct_static, direct_robust, hidden_static, hidden_robust, bounds_table };
    enum class Source { model, geo };
    enum class Sweep { none, n, d, s, cs_range };

    Kind kind = Kind::direct_static;
    Source source = Source::geo;
    Sweep sweep = Sweep::none;
    std::vector<std::string> sweep_values;  // kept verbatim for byte-stable output
    int trials = 1;                         // topologies (geo) or replicates (model) per point
    int traces = 1;                         // traces per topology
    std::uint64_t max_k = 100000;
    std::uint64_t check_interval = 10;
    std::uint64_t seed = 1;
    std::string out_dir = ".";

    // estimator parameters
    double epsilon = 0.0;
    int s_cap = 1;

    // model parameters
    ModelParams params;
    std::string traffic = "bernoulli";  // bernoulli | queued | uniform

    // geo parameters
    int grid_rows = 4, grid_cols = 7;
    double cell_side_m = 50.0;
    int clients_per_cell = 3;
    double cs_range_m = 70.0;
    std::vector<double> cs_range_list;  // paired with sweep=d values
    int target_d = 5, target_s = 2;
    int filter_attempts = 4000;
    // Grid sweeps only: pick one attempt index per topology slot that
    // passes the filter at every grid size, so the sweep compares nested
    // extensions of the same deployment (paired-sample design).
    bool paired_grid = false;
    PathLossParams pathloss;
    std::optional<double> int_threshold_dbm;
    std::optional<double> int_range_m;  // convenience: threshold from a range
    GeoDeriveOptions derive;

    // model source parameters
    std::string family = "clique";  // clique | group | file
    int family_n = 20, family_d = 6, family_s = 2;
    std::string graph_file;

    // bounds-table parameters (n, d, s, p, ... come from the fields above)
    double delta = 0.05, gamma = 0.05;
    double alpha_tsybakov = 0.1;
    double c1 = 0.25, c2 = 0.05;

    std::string config_text;  // original key=value text, echoed into metadata

    void validate() const;
};

ExperimentConfig parse_experiment_config(const std::string& text);

struct SweepAggregate {
    std::string sweep_value;
    std::optional<double> median;  // of per-topology means; absent when mostly censored
    std::uint64_t worst = 0;
    double mean = 0.0;
    int n_censored = 0;
};

struct ExperimentResult {
    std::string raw_csv;        // sweep_value,topology_id,trace_id,recovery_k,censored,stable
    std::string aggregate_json;
    std::string metadata;
    std::vector<SweepAggregate> aggregates;
};

// Runs the full sweep with position-derived per-trial seeds, writes
// raw.csv, aggregate.json and metadata.txt under out_dir, and returns
// the same content. Reruns with an identical config are byte-identical
// regardless of worker count.
ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace confgraph
