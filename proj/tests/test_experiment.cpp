#include "doctest.h"

#include <filesystem>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "confgraph/direct.hpp"
#include "confgraph/experiment.hpp"
#include "confgraph/hidden.hpp"
#include "confgraph/theory.hpp"

using namespace confgraph;

namespace {

ModelParams static_params(double p, int d, int s = 1) {
    ModelParams m;
    m.p = p;
    m.d = d;
    m.s = s;
    m.p_min = 0.5;
    return m;
}

std::string tmp_dir(const std::string& leaf) {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "confgraph_tests" / leaf;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir.string();
}

}  // namespace

TEST_CASE("recovery of a non-adjacent saturated pair is immediate") {
    const auto params = static_params(0.999, 2);
    const auto g = InterferenceGraph::create(2, {}, {}, {}, {}, params);
    const auto rec =
        measure_recovery_time(g, params, EstimatorKind::direct_static, 100, 10, 4);
    CHECK(rec.k == 1);
    CHECK_FALSE(rec.censored);
}

TEST_CASE("recovery of a complete graph is immediate") {
    const auto params = static_params(0.5, 2);
    const auto g = InterferenceGraph::create(2, {{0, 1}}, {}, {}, {}, params);
    const auto rec =
        measure_recovery_time(g, params, EstimatorKind::direct_static, 100, 10, 4);
    CHECK(rec.k == 1);
    CHECK(rec.stable);
}

TEST_CASE("recovery is censored when the traffic is too thin") {
    const auto params = static_params(0.01, 2);
    const auto g = InterferenceGraph::create(2, {}, {}, {}, {}, params);
    const auto rec =
        measure_recovery_time(g, params, EstimatorKind::direct_static, 20, 5, 4);
    CHECK(rec.censored);
    CHECK(rec.k == 20);
}

TEST_CASE("exact recovery tracking matches rerunning the estimator on prefixes") {
    const auto fam = gen_clique_family(10, 3);
    const auto params = static_params(0.5, 3);
    for (std::uint64_t seed = 100; seed < 110; ++seed) {
        const auto rec = measure_recovery_time(fam.base, params, EstimatorKind::direct_static,
                                               4000, 10, seed);
        REQUIRE_FALSE(rec.censored);
        const auto at = sample_trace(fam.base, params, rec.k, seed);
        CHECK(estimate_direct_static(at) == fam.base.direct_edges());
        if (rec.k > 1) {
            const auto before = sample_trace(fam.base, params, rec.k - 1, seed);
            CHECK(estimate_direct_static(before) != fam.base.direct_edges());
        }
    }
}

TEST_CASE("median recovery sits inside the even-odds budget") {
    // the sufficient-k bound at delta = 0.5 upper-bounds the median
    const auto fam = gen_clique_family(20, 6);
    const auto params = static_params(0.5, 6);
    BoundInputs in;
    in.n = 20;
    in.d = 6;
    in.p = 0.5;
    in.delta = 0.5;
    const auto budget = sample_complexity(Bound::direct_static_sufficient, in).k;

    std::vector<std::uint64_t> ks;
    for (std::uint64_t seed = 900; seed < 911; ++seed) {
        const auto rec = measure_recovery_time(fam.base, params, EstimatorKind::direct_static,
                                               100000, 10, seed);
        REQUIRE_FALSE(rec.censored);
        ks.push_back(rec.k);
    }
    std::sort(ks.begin(), ks.end());
    CHECK(static_cast<double>(ks[ks.size() / 2]) <= budget);
}

TEST_CASE("hidden recovery uses the checkpoint grid") {
    const auto params = static_params(0.6, 2, 1);
    const auto g = InterferenceGraph::create(2, {}, {{{0, 1}, 0.9}}, {}, {}, params);
    const std::uint64_t interval = 7;
    const auto rec = measure_recovery_time(g, params, EstimatorKind::hidden_static, 700,
                                           interval, 31, {}, 0.0, 1);
    REQUIRE_FALSE(rec.censored);
    CHECK(rec.k % interval == 0);
    const auto at = sample_trace(g, params, rec.k, 31);
    const auto est = estimate_hidden_static(at, estimate_direct_static(at), 1);
    CHECK(est.hidden_arcs() == g.hidden_arcs());
    if (rec.k > interval) {
        const auto before = sample_trace(g, params, rec.k - interval, 31);
        const auto est2 = estimate_hidden_static(before, estimate_direct_static(before), 1);
        CHECK(est2.hidden_arcs() != g.hidden_arcs());
    }
}

TEST_CASE("topology filter keeps exact degree matches") {
    PathLossParams pl;
    std::vector<DerivedGraph> candidates;
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        const auto topo = gen_topology(3, 3, 50.0, 2, pl, 70.0, seed);
        candidates.push_back(derive_graph(topo, ChannelMode::static_channel));
    }
    CHECK(topology_filter({}, 5, 2).kept.empty());
    const auto first_d = candidates[0].graph.max_direct_degree();
    const auto first_s = candidates[0].graph.max_hidden_indegree();
    const auto out = topology_filter(candidates, first_d, first_s);
    REQUIRE(!out.kept.empty());
    CHECK(out.kept[0] == 0);
    for (const auto idx : out.kept) {
        CHECK(candidates[idx].graph.max_direct_degree() == first_d);
        CHECK(candidates[idx].graph.max_hidden_indegree() == first_s);
    }
    CHECK(out.acceptance_rate == doctest::Approx(out.kept.size() / 12.0));
}

TEST_CASE("experiment config parsing") {
    const std::string text =
        "kind = direct-static\n"
        "source = model\n"
        "family = clique\n"
        "family_n = 10\n"
        "family_d = 3\n"
        "sweep = none\n"
        "trials = 2\n"
        "traces = 2\n"
        "max_k = 1500\n"
        "check_interval = 10\n"
        "seed = 9\n"
        "p = 0.5\n"
        "d = 3\n"
        "# a comment line\n";
    const auto cfg = parse_experiment_config(text);
    CHECK(cfg.kind == ExperimentConfig::Kind::direct_static);
    CHECK(cfg.family_n == 10);
    CHECK_NOTHROW(cfg.validate());

    CHECK_THROWS_AS(parse_experiment_config("bogus_key = 1\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_experiment_config("kind direct\n"), std::invalid_argument);

    auto bad = cfg;
    bad.trials = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.sweep = ExperimentConfig::Sweep::n;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);  // missing sweep_values
    bad = cfg;
    bad.kind = ExperimentConfig::Kind::direct_robust;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);  // missing epsilon
}

TEST_CASE("experiments are reproducible and worker-count independent") {
    const std::string text =
        "kind = direct-static\n"
        "source = model\n"
        "family = clique\n"
        "family_n = 10\n"
        "family_d = 3\n"
        "trials = 2\n"
        "traces = 3\n"
        "max_k = 4000\n"
        "seed = 17\n"
        "p = 0.5\n"
        "d = 3\n";
    auto cfg = parse_experiment_config(text);
    cfg.out_dir = tmp_dir("repro_a");
    const auto a = run_experiment(cfg);
    cfg.out_dir = tmp_dir("repro_b");
    const auto b = run_experiment(cfg);
    CHECK(a.raw_csv == b.raw_csv);
    CHECK(a.aggregate_json == b.aggregate_json);

#ifdef _OPENMP
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    cfg.out_dir = tmp_dir("repro_c");
    const auto c = run_experiment(cfg);
    omp_set_num_threads(saved);
    CHECK(c.raw_csv == a.raw_csv);
#endif

    // files landed on disk and carry the header
    const auto csv = read_text_file(cfg.out_dir + "/raw.csv");
    CHECK(csv.rfind("sweep_value,topology_id,trace_id,recovery_k,censored,stable", 0) == 0);
    CHECK(a.aggregates.size() == 1);
    CHECK(a.aggregates[0].n_censored == 0);
    CHECK(a.aggregates[0].median.has_value());
}

TEST_CASE("bounds-table experiments emit the closed-form table") {
    const std::string text =
        "kind = bounds-table\n"
        "family_n = 20\n"
        "d = 3\n"
        "s = 2\n"
        "p = 0.5\n"
        "p_min = 0.5\n"
        "delta = 0.05\n"
        "q_up = 0.8\n"
        "c3 = 2\n";
    auto cfg = parse_experiment_config(text);
    cfg.out_dir = tmp_dir("bounds");
    const auto res = run_experiment(cfg);
    CHECK(res.raw_csv.find("direct_static_sufficient,ok,293,") != std::string::npos);
    CHECK(read_text_file(cfg.out_dir + "/bounds.csv") == res.raw_csv);
}

TEST_CASE("a small geo experiment runs end to end") {
    // probe until a candidate topology keeps every AP loaded, so the
    // filter inside the run accepts the same attempt
    PathLossParams pl;
    const std::uint64_t master = 23;
    int accepted_attempt = -1;
    int target_d = 0, target_s = 0;
    for (int attempt = 0; attempt < 50 && accepted_attempt < 0; ++attempt) {
        const auto tseed = rng::derive_seed(master, 1, 0, 0, attempt);
        const auto probe = derive_graph(gen_topology(2, 2, 50.0, 2, pl, 70.0, tseed),
                                        ChannelMode::static_channel);
        bool loaded = true;
        for (const double r : probe.arrival_rate) loaded &= r > 0.0;
        if (loaded) {
            accepted_attempt = attempt;
            target_d = probe.graph.max_direct_degree();
            target_s = probe.graph.max_hidden_indegree();
        }
    }
    REQUIRE(accepted_attempt >= 0);

    ExperimentConfig cfg;
    cfg.kind = ExperimentConfig::Kind::direct_static;
    cfg.source = ExperimentConfig::Source::geo;
    cfg.trials = 1;
    cfg.traces = 2;
    cfg.max_k = 20000;
    cfg.seed = master;
    cfg.grid_rows = 2;
    cfg.grid_cols = 2;
    cfg.clients_per_cell = 2;
    cfg.target_d = target_d;
    cfg.target_s = target_s;
    cfg.filter_attempts = accepted_attempt + 1;
    cfg.out_dir = tmp_dir("geo");
    cfg.params = static_params(0.5, 8, 4);
    cfg.traffic = "queued";
    cfg.config_text = "generated in test\n";

    const auto res = run_experiment(cfg);
    CHECK(res.aggregates.size() == 1);
    CHECK(res.metadata.find("attempts=" + std::to_string(accepted_attempt + 1)) !=
          std::string::npos);
}
