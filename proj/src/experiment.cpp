#include "confgraph/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "confgraph/direct.hpp"
#include "confgraph/hidden.hpp"
#include "confgraph/theory.hpp"
#include "confgraph/trace.hpp"
#include "json.hpp"

namespace confgraph {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

bool direct_matches(const std::vector<NodePair>& est, const InterferenceGraph& truth) {
    return est == truth.direct_edges();
}

bool hidden_matches(const EstimationResult& est, const InterferenceGraph& truth) {
    return est.hidden_arcs() == truth.hidden_arcs();
}

bool estimate_matches(const SessionTrace& trace, const InterferenceGraph& truth,
                      EstimatorKind kind, const ModelParams& params, double epsilon, int s_cap) {
    switch (kind) {
        case EstimatorKind::direct_static:
            return direct_matches(estimate_direct_static(trace), truth);
        case EstimatorKind::direct_robust:
            return direct_matches(estimate_direct_robust(trace, epsilon), truth);
        case EstimatorKind::hidden_static: {
            const auto d_est = estimate_direct_static(trace);
            return hidden_matches(estimate_hidden_static(trace, d_est, s_cap), truth);
        }
        case EstimatorKind::hidden_robust: {
            const auto d_est = estimate_direct_robust(trace, epsilon);
            return hidden_matches(estimate_hidden_robust(trace, d_est, params), truth);
        }
    }
    return false;
}

}  // namespace

RecoveryOutcome measure_recovery_time(const InterferenceGraph& truth, const ModelParams& params,
                                      EstimatorKind kind, std::uint64_t max_k,
                                      std::uint64_t check_interval, std::uint64_t seed,
                                      const TrafficSpec& traffic, double epsilon, int s_cap) {
    if (max_k < 1) fail("measure_recovery_time: max_k must be >= 1");
    if (check_interval < 1) fail("measure_recovery_time: check interval must be >= 1");
    params.validate();

    const int n = truth.n();
    QueueState queues{std::vector<std::uint64_t>(n, 0)};
    QueueState* qptr = traffic.mode == TrafficSpec::Mode::queued ? &queues : nullptr;

    if (kind == EstimatorKind::direct_static) {
        // Elimination is monotone: the estimate equals the truth from the
        // session that removes the last non-edge onward, so the exact
        // recovery session can be tracked pair by pair.
        std::vector<BitVec> pending(n, BitVec(n));
        std::uint64_t remaining = 0;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                if (!truth.adjacent(i, j)) {
                    pending[i].set(j);
                    ++remaining;
                }
            }
        }
        if (remaining == 0) return {1, false, true};  // complete graph: equal after one session
        for (std::uint64_t t = 0; t < max_k; ++t) {
            const auto x = simulate_session_x(truth, params, traffic, seed, t, qptr);
            std::vector<int> active;
            for (int i = 0; i < n; ++i)
                if (x[i]) active.push_back(i);
            for (std::size_t a = 0; a < active.size(); ++a) {
                for (std::size_t b = a + 1; b < active.size(); ++b) {
                    const int i = active[a], j = active[b];
                    if (pending[i].test(j)) {
                        pending[i].reset(j);
                        --remaining;
                    }
                }
            }
            if (remaining == 0) return {t + 1, false, true};
        }
        return {max_k, true, true};
    }

    SessionTrace trace = SessionTrace::with_capacity(max_k, n);
    RecoveryOutcome out{max_k, true, true};
    for (std::uint64_t t = 0; t < max_k; ++t) {
        simulate_session(truth, params, traffic, seed, t, qptr, trace, t);
        const std::uint64_t filled = t + 1;
        if (filled % check_interval != 0 && filled != max_k) continue;
        trace.set_k(filled);
        const bool match = estimate_matches(trace, truth, kind, params, epsilon, s_cap);
        if (match && out.censored) {
            out.k = filled;
            out.censored = false;
        } else if (!match && !out.censored) {
            out.stable = false;
        }
    }
    return out;
}

FilterOutcome topology_filter(const std::vector<DerivedGraph>& candidates, int target_d,
                              int target_s) {
    if (target_d < 1 || target_s < 1) fail("topology_filter: targets must be >= 1");
    FilterOutcome out;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const auto& g = candidates[i].graph;
        if (g.max_direct_degree() == target_d && g.max_hidden_indegree() == target_s)
            out.kept.push_back(i);
    }
    out.acceptance_rate =
        candidates.empty() ? 0.0 : static_cast<double>(out.kept.size()) / candidates.size();
    return out;
}

void ExperimentConfig::validate() const {
    if (kind == Kind::bounds_table) return;  // consumes only the bound inputs
    if (trials < 1) fail("config: trials must be >= 1");
    if (traces < 1) fail("config: traces must be >= 1");
    if (max_k < 1) fail("config: max_k must be >= 1");
    if (check_interval < 1) fail("config: check_interval must be >= 1");
    if (sweep != Sweep::none && sweep_values.empty())
        fail("config: sweep requested without sweep_values");
    if (kind == Kind::direct_robust || kind == Kind::hidden_robust) {
        if (!(epsilon > 0.0 && epsilon < 1.0))
            fail("config: robust estimators need epsilon in (0,1)");
    }
    if (source == Source::geo) {
        if (grid_rows < 1 || grid_cols < 1) fail("config: grid dimensions must be positive");
        if (sweep == Sweep::d && !cs_range_list.empty() &&
            cs_range_list.size() != sweep_values.size())
            fail("config: cs_range_list must pair with sweep_values");
        if (sweep == Sweep::s) fail("config: geo source sweeps n, d or cs_range");
        if (paired_grid && sweep != Sweep::n)
            fail("config: paired_grid applies to grid-size sweeps only");
    } else {
        if (paired_grid) fail("config: paired_grid applies to the geo source only");
        if (family != "clique" && family != "group" && family != "file")
            fail("config: family must be clique, group or file");
        if (family == "file" && graph_file.empty()) fail("config: family=file needs graph_file");
    }
    if (traffic != "bernoulli" && traffic != "queued" && traffic != "uniform")
        fail("config: traffic must be bernoulli, queued or uniform");
    params.validate();
}

ExperimentConfig parse_experiment_config(const std::string& text) {
    ExperimentConfig cfg;
    cfg.config_text = text;
    std::istringstream in(text);
    std::string line;
    auto split_list = [](const std::string& s) {
        std::vector<std::string> out;
        std::istringstream ls(s);
        std::string tok;
        while (std::getline(ls, tok, ',')) {
            if (!tok.empty()) out.push_back(tok);
        }
        return out;
    };
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                fail("config: expected key=value, got: " + line);
            continue;
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty()) fail("config: empty key");

        if (key == "kind") {
            if (val == "direct-static") cfg.kind = ExperimentConfig::Kind::direct_static;
            else if (val == "direct-robust") cfg.kind = ExperimentConfig::Kind::direct_robust;
            else if (val == "hidden-static") cfg.kind = ExperimentConfig::Kind::hidden_static;
            else if (val == "hidden-robust") cfg.kind = ExperimentConfig::Kind::hidden_robust;
            else if (val == "bounds-table") cfg.kind = ExperimentConfig::Kind::bounds_table;
            else fail("config: unknown kind " + val);
        } else if (key == "source") {
            if (val == "model") cfg.source = ExperimentConfig::Source::model;
            else if (val == "geo") cfg.source = ExperimentConfig::Source::geo;
            else fail("config: unknown source " + val);
        } else if (key == "sweep") {
            if (val == "none") cfg.sweep = ExperimentConfig::Sweep::none;
            else if (val == "n") cfg.sweep = ExperimentConfig::Sweep::n;
            else if (val == "d") cfg.sweep = ExperimentConfig::Sweep::d;
            else if (val == "s") cfg.sweep = ExperimentConfig::Sweep::s;
            else if (val == "cs_range") cfg.sweep = ExperimentConfig::Sweep::cs_range;
            else fail("config: unknown sweep " + val);
        } else if (key == "sweep_values") {
            cfg.sweep_values = split_list(val);
        } else if (key == "trials") cfg.trials = std::stoi(val);
        else if (key == "traces") cfg.traces = std::stoi(val);
        else if (key == "max_k") cfg.max_k = std::stoull(val);
        else if (key == "check_interval") cfg.check_interval = std::stoull(val);
        else if (key == "seed") cfg.seed = std::stoull(val);
        else if (key == "out") cfg.out_dir = val;
        else if (key == "epsilon") cfg.epsilon = std::stod(val);
        else if (key == "s_cap") cfg.s_cap = std::stoi(val);
        else if (key == "p") cfg.params.p = std::stod(val);
        else if (key == "w") cfg.params.backoff_window = std::stod(val);
        else if (key == "d") cfg.params.d = std::stoi(val);
        else if (key == "s") cfg.params.s = std::stoi(val);
        else if (key == "p_min") cfg.params.p_min = std::stod(val);
        else if (key == "p_fade") cfg.params.p_fade = std::stod(val);
        else if (key == "q_low") cfg.params.q_low = std::stod(val);
        else if (key == "q_up") cfg.params.q_up = std::stod(val);
        else if (key == "c3") cfg.params.c3 = std::stod(val);
        else if (key == "channel") {
            if (val == "static") cfg.params.channel = ChannelMode::static_channel;
            else if (val == "random") cfg.params.channel = ChannelMode::random_channel;
            else fail("config: unknown channel " + val);
        } else if (key == "traffic") cfg.traffic = val;
        else if (key == "grid_rows") cfg.grid_rows = std::stoi(val);
        else if (key == "grid_cols") cfg.grid_cols = std::stoi(val);
        else if (key == "cell_side_m") cfg.cell_side_m = std::stod(val);
        else if (key == "clients_per_cell") cfg.clients_per_cell = std::stoi(val);
        else if (key == "cs_range_m") cfg.cs_range_m = std::stod(val);
        else if (key == "cs_range_list") {
            for (const auto& tok : split_list(val)) cfg.cs_range_list.push_back(std::stod(tok));
        } else if (key == "target_d") cfg.target_d = std::stoi(val);
        else if (key == "target_s") cfg.target_s = std::stoi(val);
        else if (key == "filter_attempts") cfg.filter_attempts = std::stoi(val);
        else if (key == "paired_grid") cfg.paired_grid = std::stoi(val) != 0;
        else if (key == "gamma_l0_dbm") cfg.pathloss.gamma_l0_dbm = std::stod(val);
        else if (key == "alpha_pathloss") cfg.pathloss.alpha_pathloss = std::stod(val);
        else if (key == "sigma2_db") cfg.pathloss.sigma2_db = std::stod(val);
        else if (key == "l0_m") cfg.pathloss.l0_m = std::stod(val);
        else if (key == "int_threshold_dbm") cfg.int_threshold_dbm = std::stod(val);
        else if (key == "int_range_m") cfg.int_range_m = std::stod(val);
        else if (key == "packets_per_client") cfg.derive.packets_per_client = std::stod(val);
        else if (key == "derive_p_min") cfg.derive.p_min = std::stod(val);
        else if (key == "fade_margin_db") cfg.derive.fade_margin_db = std::stod(val);
        else if (key == "family") cfg.family = val;
        else if (key == "family_n") cfg.family_n = std::stoi(val);
        else if (key == "family_d") cfg.family_d = std::stoi(val);
        else if (key == "family_s") cfg.family_s = std::stoi(val);
        else if (key == "graph_file") cfg.graph_file = val;
        else if (key == "delta") cfg.delta = std::stod(val);
        else if (key == "gamma") cfg.gamma = std::stod(val);
        else if (key == "alpha") cfg.alpha_tsybakov = std::stod(val);
        else if (key == "c1") cfg.c1 = std::stod(val);
        else if (key == "c2") cfg.c2 = std::stod(val);
        else fail("config: unknown key " + key);
    }
    return cfg;
}

namespace {

struct RowResult {
    std::string sweep_value;
    int topology_id = 0;
    int trace_id = 0;
    std::uint64_t recovery_k = 0;
    bool censored = false;
    bool stable = true;
};

struct UnitLog {
    int attempts = 0;
    std::uint64_t topology_seed = 0;
};

EstimatorKind to_estimator(ExperimentConfig::Kind k) {
    switch (k) {
        case ExperimentConfig::Kind::direct_static: return EstimatorKind::direct_static;
        case ExperimentConfig::Kind::direct_robust: return EstimatorKind::direct_robust;
        case ExperimentConfig::Kind::hidden_static: return EstimatorKind::hidden_static;
        case ExperimentConfig::Kind::hidden_robust: return EstimatorKind::hidden_robust;
        case ExperimentConfig::Kind::bounds_table: break;  // handled before dispatch
    }
    return EstimatorKind::direct_static;
}

}  // namespace

namespace {

struct GeoPoint {
    int cols = 0;
    double cs = 0.0;
    int target_d = 0, target_s = 0;
};

GeoPoint resolve_geo_point(const ExperimentConfig& cfg, const std::string& value,
                           int point_idx) {
    GeoPoint pt{cfg.grid_cols, cfg.cs_range_m, cfg.target_d, cfg.target_s};
    if (cfg.sweep == ExperimentConfig::Sweep::n) {
        const int cells = std::stoi(value);
        if (cells % cfg.grid_rows != 0)
            throw std::invalid_argument("sweep=n value not divisible by grid_rows");
        pt.cols = cells / cfg.grid_rows;
    } else if (cfg.sweep == ExperimentConfig::Sweep::d) {
        pt.target_d = std::stoi(value);
        if (!cfg.cs_range_list.empty()) pt.cs = cfg.cs_range_list[point_idx];
    } else if (cfg.sweep == ExperimentConfig::Sweep::cs_range) {
        pt.cs = std::stod(value);
    }
    return pt;
}

// An AP that lost every client to a neighbor never transmits, leaving
// its pairs unrecoverable; such topologies are rejected along with
// degree mismatches.
bool geo_filter_accepts(const DerivedGraph& derived, const GeoPoint& pt) {
    for (const double r : derived.arrival_rate)
        if (!(r > 0.0)) return false;
    return derived.graph.max_direct_degree() == pt.target_d &&
           derived.graph.max_hidden_indegree() == pt.target_s;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    namespace fs = std::filesystem;

    if (cfg.kind == ExperimentConfig::Kind::bounds_table) {
        BoundInputs in;
        in.n = cfg.family_n;
        in.d = cfg.params.d;
        in.s = cfg.params.s;
        in.p = cfg.params.p;
        in.p_min = cfg.params.p_min;
        in.p_fade = cfg.params.p_fade;
        in.q_low = cfg.params.q_low;
        in.q_up = cfg.params.q_up;
        in.c3 = cfg.params.c3;
        in.delta = cfg.delta;
        in.gamma = cfg.gamma;
        in.alpha_tsybakov = cfg.alpha_tsybakov;
        in.c1 = cfg.c1;
        in.c2 = cfg.c2;
        ExperimentResult result;
        result.raw_csv = bounds_table_csv(in);
        result.aggregate_json = "{\n  \"points\": []\n}\n";
        result.metadata = "# configuration\n" + cfg.config_text;
        fs::create_directories(cfg.out_dir);
        write_file((fs::path(cfg.out_dir) / "bounds.csv").string(), result.raw_csv);
        write_file((fs::path(cfg.out_dir) / "metadata.txt").string(), result.metadata);
        return result;
    }

    const std::vector<std::string> points =
        cfg.sweep == ExperimentConfig::Sweep::none ? std::vector<std::string>{"-"}
                                                   : cfg.sweep_values;
    const int n_points = static_cast<int>(points.size());
    const int units = n_points * cfg.trials;
    const EstimatorKind estimator = to_estimator(cfg.kind);

    std::optional<double> int_thr = cfg.int_threshold_dbm;
    if (!int_thr && cfg.int_range_m)
        int_thr = received_power(cfg.pathloss, *cfg.int_range_m, 0.0);
    auto make_topology = [&](const GeoPoint& pt, std::uint64_t tseed) {
        return gen_topology(cfg.grid_rows, pt.cols, cfg.cell_side_m, cfg.clients_per_cell,
                            cfg.pathloss, pt.cs, tseed, int_thr);
    };

    // Paired grid sweep: one attempt index per topology slot, accepted
    // only when every grid size passes the filter, so the sweep compares
    // nested deployments drawn from common cell randomness.
    std::vector<int> paired_attempt(cfg.trials, -1);
    if (cfg.paired_grid) {
        std::vector<std::string> pair_errors(cfg.trials);
#pragma omp parallel for schedule(dynamic)
        for (int topo_idx = 0; topo_idx < cfg.trials; ++topo_idx) {
            try {
                for (int attempt = 0; attempt < cfg.filter_attempts; ++attempt) {
                    const std::uint64_t tseed = rng::derive_seed(cfg.seed, 1, topo_idx, attempt);
                    bool all = true;
                    for (int pidx = 0; pidx < n_points && all; ++pidx) {
                        const GeoPoint pt = resolve_geo_point(cfg, points[pidx], pidx);
                        all = geo_filter_accepts(
                            derive_graph(make_topology(pt, tseed), cfg.params.channel,
                                         cfg.derive),
                            pt);
                    }
                    if (all) {
                        paired_attempt[topo_idx] = attempt;
                        break;
                    }
                }
                if (paired_attempt[topo_idx] < 0)
                    throw std::runtime_error("no deployment passed the filter at every grid size "
                                             "within " +
                                             std::to_string(cfg.filter_attempts) + " attempts");
            } catch (const std::exception& e) {
                pair_errors[topo_idx] = e.what();
            }
        }
        for (int t = 0; t < cfg.trials; ++t)
            if (!pair_errors[t].empty())
                throw std::runtime_error("paired topology slot " + std::to_string(t) +
                                         " failed: " + pair_errors[t]);
    }

    std::vector<std::vector<RowResult>> rows(units);
    std::vector<UnitLog> logs(units);
    std::vector<std::string> unit_errors(units);

#pragma omp parallel for schedule(dynamic)
    for (int unit = 0; unit < units; ++unit) {
        const int point_idx = unit / cfg.trials;
        const int topo_idx = unit % cfg.trials;
        const std::string& value = points[point_idx];
        try {
            ModelParams params = cfg.params;
            TrafficSpec traffic;
            std::optional<InterferenceGraph> truth;

            if (cfg.source == ExperimentConfig::Source::geo) {
                const GeoPoint pt = resolve_geo_point(cfg, value, point_idx);

                bool found = false;
                const int first_attempt = cfg.paired_grid ? paired_attempt[topo_idx] : 0;
                for (int attempt = first_attempt; attempt < cfg.filter_attempts && !found;
                     ++attempt) {
                    const std::uint64_t tseed =
                        cfg.paired_grid ? rng::derive_seed(cfg.seed, 1, topo_idx, attempt)
                                        : rng::derive_seed(cfg.seed, 1, point_idx, topo_idx,
                                                           attempt);
                    DerivedGraph derived =
                        derive_graph(make_topology(pt, tseed), params.channel, cfg.derive);
                    logs[unit].attempts = attempt + 1;
                    if (geo_filter_accepts(derived, pt)) {
                        logs[unit].topology_seed = tseed;
                        found = true;
                        truth = derived.graph;
                        if (cfg.traffic == "queued") {
                            traffic.mode = TrafficSpec::Mode::queued;
                            traffic.rate = derived.arrival_rate;
                        } else if (cfg.traffic == "bernoulli") {
                            traffic.rate = derived.bernoulli_intensity;
                        }
                    }
                    if (cfg.paired_grid) break;  // the pre-pass fixed the attempt
                }
                if (!found)
                    throw std::runtime_error("no topology matched (d=" +
                                             std::to_string(pt.target_d) + ", s=" +
                                             std::to_string(pt.target_s) + ") within " +
                                             std::to_string(cfg.filter_attempts) + " attempts");
                // Estimator thresholds stay as configured: the pipeline
                // must not read anything off the derived ground truth.
            } else {
                int fam_n = cfg.family_n, fam_d = cfg.family_d, fam_s = cfg.family_s;
                if (cfg.sweep == ExperimentConfig::Sweep::n) fam_n = std::stoi(value);
                else if (cfg.sweep == ExperimentConfig::Sweep::d) fam_d = std::stoi(value);
                else if (cfg.sweep == ExperimentConfig::Sweep::s) fam_s = std::stoi(value);
                if (cfg.family == "clique") {
                    truth = gen_clique_family(fam_n, fam_d).base;
                } else if (cfg.family == "group") {
                    const double c1 = double(fam_d) / fam_n;
                    const double c2 = double(std::max(1, fam_s - 1)) / fam_n;
                    truth = gen_group_family(fam_n, fam_d, fam_s, cfg.params.p_min, c1, c2).base;
                } else {
                    truth = graph_from_text(read_text_file(cfg.graph_file));
                }
            }

            auto& unit_rows = rows[unit];
            unit_rows.resize(cfg.traces);
            for (int trace_idx = 0; trace_idx < cfg.traces; ++trace_idx) {
                // Paired sweeps reuse the trace stream across grid sizes;
                // shared cells then see identical traffic and backoff draws.
                const std::uint64_t rseed =
                    rng::derive_seed(cfg.seed, 2, cfg.paired_grid ? 0 : point_idx, topo_idx,
                                     trace_idx);
                const RecoveryOutcome rec =
                    measure_recovery_time(*truth, params, estimator, cfg.max_k,
                                          cfg.check_interval, rseed, traffic, cfg.epsilon,
                                          cfg.s_cap);
                unit_rows[trace_idx] = {value,        topo_idx,     trace_idx,
                                        rec.k,        rec.censored, rec.stable};
            }
        } catch (const std::exception& e) {
            unit_errors[unit] = e.what();
        }
    }

    for (int unit = 0; unit < units; ++unit)
        if (!unit_errors[unit].empty())
            throw std::runtime_error("experiment unit " + std::to_string(unit) + " failed: " +
                                     unit_errors[unit]);

    ExperimentResult result;
    std::ostringstream csv;
    csv << "sweep_value,topology_id,trace_id,recovery_k,censored,stable\n";
    for (const auto& unit_rows : rows)
        for (const auto& r : unit_rows)
            csv << r.sweep_value << ',' << r.topology_id << ',' << r.trace_id << ','
                << r.recovery_k << ',' << (r.censored ? 1 : 0) << ',' << (r.stable ? 1 : 0)
                << '\n';
    result.raw_csv = csv.str();

    nlohmann::ordered_json agg = nlohmann::ordered_json::array();
    for (int pt = 0; pt < n_points; ++pt) {
        std::vector<double> topo_means;
        std::uint64_t worst = 0;
        int censored = 0;
        int uncensored_rows = 0, total_rows = 0;
        for (int topo = 0; topo < cfg.trials; ++topo) {
            const auto& unit_rows = rows[pt * cfg.trials + topo];
            double sum = 0.0;
            for (const auto& r : unit_rows) {
                sum += static_cast<double>(r.recovery_k);
                worst = std::max(worst, r.recovery_k);
                censored += r.censored ? 1 : 0;
                uncensored_rows += r.censored ? 0 : 1;
                ++total_rows;
            }
            topo_means.push_back(sum / unit_rows.size());
        }
        SweepAggregate a;
        a.sweep_value = points[pt];
        a.worst = worst;
        a.mean = std::accumulate(topo_means.begin(), topo_means.end(), 0.0) / topo_means.size();
        a.n_censored = censored;
        if (2 * uncensored_rows >= total_rows) {
            std::vector<double> sorted = topo_means;
            std::sort(sorted.begin(), sorted.end());
            const std::size_t m = sorted.size();
            a.median = (m % 2 == 1) ? sorted[m / 2] : (sorted[m / 2 - 1] + sorted[m / 2]) / 2.0;
        }
        result.aggregates.push_back(a);

        nlohmann::ordered_json j;
        j["sweep_value"] = a.sweep_value;
        if (a.median) j["median"] = *a.median;
        else j["median"] = nullptr;
        j["worst"] = a.worst;
        j["mean"] = a.mean;
        j["n_censored"] = a.n_censored;
        agg.push_back(j);
    }
    nlohmann::ordered_json top;
    top["points"] = agg;
    result.aggregate_json = top.dump(2) + "\n";

    std::ostringstream meta;
    meta << "# configuration\n" << cfg.config_text;
    if (!cfg.config_text.empty() && cfg.config_text.back() != '\n') meta << "\n";
    meta << "# topology selection\n";
    for (int unit = 0; unit < units; ++unit) {
        const int pt = unit / cfg.trials;
        if (cfg.source == ExperimentConfig::Source::geo)
            meta << "point=" << points[pt] << " topology=" << unit % cfg.trials
                 << " attempts=" << logs[unit].attempts << " seed=" << logs[unit].topology_seed
                 << "\n";
    }
    result.metadata = meta.str();

    fs::create_directories(cfg.out_dir);
    write_file((fs::path(cfg.out_dir) / "raw.csv").string(), result.raw_csv);
    write_file((fs::path(cfg.out_dir) / "aggregate.json").string(), result.aggregate_json);
    write_file((fs::path(cfg.out_dir) / "metadata.txt").string(), result.metadata);
    return result;
}

}  // namespace confgraph
