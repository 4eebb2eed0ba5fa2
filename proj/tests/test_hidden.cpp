#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "confgraph/direct.hpp"
#include "confgraph/hidden.hpp"
#include "confgraph/theory.hpp"
#include "confgraph/rng.hpp"
#include "confgraph/sim.hpp"
#include "oracles.hpp"

using namespace confgraph;

namespace {

BitVec make_set(int n, std::initializer_list<int> members) {
    BitVec s(n);
    for (int v : members) s.set(v);
    return s;
}

ModelParams base_params(double p = 0.5, int d = 4, int s = 2, double p_min = 0.2) {
    ModelParams m;
    m.p = p;
    m.d = d;
    m.s = s;
    m.p_min = p_min;
    return m;
}

// Random low-in-degree hidden graphs for equivalence and consistency
// sweeps.
InterferenceGraph random_s1_graph(int n, std::uint64_t seed, const ModelParams& params) {
    std::vector<NodePair> direct;
    int draw = 0;
    std::vector<int> deg(n, 0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rng::uniform(seed, 101, ++draw) < 0.2 && deg[i] < params.d - 1 &&
                deg[j] < params.d - 1) {
                direct.push_back({i, j});
                ++deg[i];
                ++deg[j];
            }
    auto adjacent = [&](int i, int j) {
        return std::find(direct.begin(), direct.end(), make_pair_sorted(i, j)) != direct.end();
    };
    std::vector<std::pair<Arc, double>> hidden;
    for (int j = 0; j < n; ++j) {
        if (rng::uniform(seed, 102, j) < 0.6) {
            const int i = static_cast<int>(rng::uniform(seed, 103, j) * n);
            if (i != j && i < n && !adjacent(i, j)) hidden.push_back({{i, j}, 0.9});
        }
    }
    return InterferenceGraph::create(n, direct, hidden, {}, {}, params);
}

}  // namespace

TEST_CASE("candidate collection") {
    SessionTrace t(3, 3);
    // session 0: 0 and 2 transmit, 2 fails
    t.set(0, 0, true, false);
    t.set(0, 2, true, true);
    // session 1: 1 and 2 transmit, 2 succeeds
    t.set(1, 1, true, false);
    t.set(1, 2, true, false);
    // session 2: everyone transmits, 2 fails
    t.set(2, 0, true, false);
    t.set(2, 1, true, false);
    t.set(2, 2, true, true);

    const auto c = collect_candidates(t, 2);
    REQUIRE(c.sets.size() == 2);
    CHECK(c.nack_sessions == std::vector<std::uint64_t>{0, 2});
    CHECK(c.sets[0] == make_set(3, {0}));
    CHECK(c.sets[1] == make_set(3, {0, 1}));

    CHECK(collect_candidates(t, 0).sets.empty());
    CHECK_THROWS_AS(collect_candidates(t, 5), std::invalid_argument);
}

TEST_CASE("minimum hitting set") {
    const std::vector<int> allowed = {1, 2, 3, 4};
    {
        const std::vector<BitVec> sets = {make_set(5, {2}), make_set(5, {2, 3})};
        CHECK(*min_hitting_set(sets, allowed, 2) == std::vector<int>{2});
    }
    {
        const std::vector<BitVec> sets = {make_set(5, {1, 2}), make_set(5, {3, 4}),
                                          make_set(5, {1, 3})};
        CHECK(*min_hitting_set(sets, allowed, 2) == std::vector<int>{1, 3});
    }
    CHECK(*min_hitting_set({}, allowed, 2) == std::vector<int>{});
    // an unhittable (empty) member means no hitting set exists
    CHECK_FALSE(min_hitting_set({BitVec(5)}, allowed, 3).has_value());
    // cap too small
    {
        const std::vector<BitVec> sets = {make_set(5, {1}), make_set(5, {2}), make_set(5, {3})};
        CHECK_FALSE(min_hitting_set(sets, allowed, 2).has_value());
        CHECK(min_hitting_set(sets, allowed, 3).has_value());
    }
    // members outside `allowed` cannot be picked
    {
        const std::vector<BitVec> sets = {make_set(5, {0})};
        CHECK_FALSE(min_hitting_set(sets, allowed, 3).has_value());
    }
}

TEST_CASE("minimum hitting set agrees with exhaustive search on random instances") {
    for (std::uint64_t inst = 0; inst < 120; ++inst) {
        const int n = 12;
        const int n_sets = 1 + static_cast<int>(rng::uniform(inst, 1) * 6);
        std::vector<BitVec> sets;
        std::vector<std::vector<int>> plain;
        for (int s = 0; s < n_sets; ++s) {
            BitVec bv(n);
            std::vector<int> members;
            for (int v = 0; v < n; ++v)
                if (rng::uniform(inst, 2, s, v) < 0.3) {
                    bv.set(v);
                    members.push_back(v);
                }
            if (members.empty()) {
                bv.set(s % n);
                members.push_back(s % n);
            }
            sets.push_back(bv);
            plain.push_back(members);
        }
        std::vector<int> allowed;
        for (int v = 0; v < n; ++v) allowed.push_back(v);
        const int cap = 1 + static_cast<int>(rng::uniform(inst, 3) * 3);

        const auto got = min_hitting_set(sets, allowed, cap);
        const auto want = oracles::hitting_set_exhaustive(plain, allowed, cap);
        CHECK(got.has_value() == want.has_value());
        if (got && want) {
            CHECK(got->size() == want->size());
            for (const auto& members : plain) {
                bool hit = false;
                for (int v : *got)
                    if (std::find(members.begin(), members.end(), v) != members.end()) hit = true;
                CHECK(hit);
            }
        }
    }
}

TEST_CASE("static hidden estimation on a certain interferer") {
    const auto params = base_params(0.9, 2, 1, 0.9);
    const auto g = InterferenceGraph::create(2, {}, {{{0, 1}, 1.0}}, {}, {}, params);
    int recovered = 0;
    const int trials = 200;
    for (int trial = 0; trial < trials; ++trial) {
        const auto trace = sample_trace(g, params, 200, 1000 + trial);
        const auto d_est = estimate_direct_static(trace);
        const auto est = estimate_hidden_static(trace, d_est, 1);
        recovered += est.hidden_arcs() == g.hidden_arcs();
    }
    CHECK(recovered >= trials * 0.99);
}

TEST_CASE("static hidden estimation with no failures is empty") {
    const auto params = base_params();
    const auto fam = gen_clique_family(8, 3);
    const auto trace = sample_trace(fam.base, params, 300, 7);
    const auto est = estimate_hidden_static(trace, estimate_direct_static(trace), 2);
    CHECK(est.hidden.empty());
    CHECK(est.flags.empty());
}

TEST_CASE("an unexplainable failure is flagged") {
    SessionTrace t(2, 2);
    t.set(0, 0, true, true);  // fails with nobody else active
    t.set(1, 1, true, false);
    const auto est = estimate_hidden_static(t, {}, 2);
    REQUIRE(est.flags.size() == 1);
    CHECK(est.flags[0].node == 0);
    CHECK(est.hidden.empty());
}

TEST_CASE("single-interferer counting estimator") {
    {
        // candidates for node 1: {0}, {0,2} -> interferer 0
        SessionTrace t(2, 3);
        t.set(0, 0, true, false);
        t.set(0, 1, true, true);
        t.set(1, 0, true, false);
        t.set(1, 2, true, false);
        t.set(1, 1, true, true);
        const auto est = estimate_hidden_s1(t);
        CHECK(est.hidden_arcs() == std::vector<Arc>{{0, 1}});
        CHECK(est.flags.empty());
    }
    {
        // both 0 and 2 active in every failure: tie broken low, flagged
        SessionTrace t(2, 3);
        for (int r = 0; r < 2; ++r) {
            t.set(r, 0, true, false);
            t.set(r, 2, true, false);
            t.set(r, 1, true, true);
        }
        const auto est = estimate_hidden_s1(t);
        CHECK(est.hidden_arcs() == std::vector<Arc>{{0, 1}});
        REQUIRE(est.flags.size() == 1);
        CHECK(est.flags[0].node == 1);
    }
    {
        // no common node across failures
        SessionTrace t(2, 3);
        t.set(0, 0, true, false);
        t.set(0, 1, true, true);
        t.set(1, 2, true, false);
        t.set(1, 1, true, true);
        const auto est = estimate_hidden_s1(t);
        CHECK(est.hidden.empty());
        REQUIRE(est.flags.size() == 1);
    }
}

TEST_CASE("counting and hitting-set estimators coincide when s = 1") {
    const auto params = base_params(0.5, 4, 1, 0.9);
    for (std::uint64_t inst = 0; inst < 25; ++inst) {
        const auto g = random_s1_graph(7, inst, params);
        const auto trace = sample_trace(g, params, 250, 500 + inst);
        const auto s1 = estimate_hidden_s1(trace);
        const auto mhs = estimate_hidden_static(trace, {}, 1, false);
        CHECK(s1.hidden_arcs() == mhs.hidden_arcs());
    }
}

TEST_CASE("minimized failure ratio on a crafted trace") {
    // ten sessions with both nodes active, three of them failed;
    // two extra sessions break up the pattern
    SessionTrace t(12, 2);
    for (int r = 0; r < 10; ++r) {
        t.set(r, 0, true, false);
        t.set(r, 1, true, r < 3);
    }
    t.set(10, 0, true, false);
    t.set(11, 1, true, false);
    const auto ph = p_hat(t, 0, 1, BitVec(2), 0);
    REQUIRE(ph.has_value());
    CHECK(*ph == doctest::Approx(0.3));

    // no joint sessions at all -> undefined
    SessionTrace u(4, 2);
    u.set(0, 0, true, false);
    u.set(1, 1, true, false);
    CHECK_FALSE(p_hat(u, 0, 1, BitVec(2), 1).has_value());

    CHECK_THROWS_AS(p_hat(t, 0, 0, BitVec(2), 1), std::invalid_argument);
    CHECK_THROWS_AS(p_hat(t, 0, 1, make_set(2, {0}), 1), std::invalid_argument);
}

TEST_CASE("minimized failure ratio estimates the true weight") {
    ModelParams params = base_params(0.5, 2, 1, 0.6);
    params.channel = ChannelMode::random_channel;
    params.q_low = 0.0;
    params.q_up = 1.0;
    const auto g = InterferenceGraph::create(3, {}, {{{0, 1}, 0.6}}, {}, {}, params);
    const auto trace = sample_trace(g, params, 100000, 420);
    const auto ph = p_hat(trace, 0, 1, BitVec(3), 1);
    REQUIRE(ph.has_value());
    CHECK(std::abs(*ph - 0.6) <= 0.02);
}

TEST_CASE("robust hidden estimator thresholds inclusively") {
    ModelParams params = base_params(0.5, 2, 1, 0.6);
    params.channel = ChannelMode::random_channel;
    params.p_fade = 0.1;  // ratio threshold (0.6 + 0.1)/2 = 0.35
    // twenty joint sessions, exactly seven failures: ratio 0.35
    SessionTrace t(20, 2);
    for (int r = 0; r < 20; ++r) {
        t.set(r, 0, true, false);
        t.set(r, 1, true, r < 7);
    }
    auto est = estimate_hidden_robust(t, {}, params);
    CHECK(est.hidden_arcs() == std::vector<Arc>{{0, 1}});
    CHECK(est.pair_stat[0][1] == doctest::Approx(0.35));

    // one failure fewer: below the threshold, no edge
    SessionTrace u(20, 2);
    for (int r = 0; r < 20; ++r) {
        u.set(r, 0, true, false);
        u.set(r, 1, true, r < 6);
    }
    CHECK(estimate_hidden_robust(u, {}, params).hidden.empty());
}

TEST_CASE("robust hidden estimator ignores clean traces") {
    ModelParams params = base_params(0.5, 2, 1, 0.6);
    params.channel = ChannelMode::random_channel;
    params.p_fade = 0.1;
    SessionTrace t(50, 3);
    for (int r = 0; r < 50; ++r)
        for (int i = 0; i < 3; ++i) t.set(r, i, true, false);
    const auto est = estimate_hidden_robust(t, {}, params);
    CHECK(est.hidden.empty());
    CHECK(est.flags.empty());  // every pair had joint sessions
}

TEST_CASE("robust pipeline statistics equal the standalone ratio estimator") {
    ModelParams params = base_params(0.5, 3, 1, 0.6);
    params.channel = ChannelMode::random_channel;
    params.p_fade = 0.1;
    const auto g = InterferenceGraph::create(
        5, {{0, 1}}, {{{2, 3}, 0.7}}, std::vector<double>(5, 0.1), {}, params);
    const auto trace = sample_trace(g, params, 20000, 99);
    const auto d_est = estimate_direct_robust(trace, 0.02);
    const auto est = estimate_hidden_robust(trace, d_est, params);

    std::vector<BitVec> adj(5, BitVec(5));
    for (const auto& [i, j] : d_est) {
        adj[i].set(j);
        adj[j].set(i);
    }
    for (int j = 0; j < 5; ++j) {
        for (int i = 0; i < 5; ++i) {
            if (i == j || adj[j].test(i)) continue;
            const auto standalone = p_hat(trace, i, j, adj[j], params.s);
            if (standalone) CHECK(est.pair_stat[i][j] == doctest::Approx(*standalone));
            else CHECK(std::isnan(est.pair_stat[i][j]));
        }
    }
}

TEST_CASE("hidden recovery frequency is nondecreasing in the observation length") {
    const auto params = base_params(0.5, 3, 1, 0.5);
    const auto g = InterferenceGraph::create(
        4, {{2, 3}}, {{{0, 1}, 0.5}}, {}, {}, params);
    const std::vector<std::uint64_t> ks = {40, 80, 160, 320};
    std::vector<double> freq;
    for (const auto k : ks) {
        int hits = 0;
        const int trials = 150;
        for (int trial = 0; trial < trials; ++trial) {
            const auto trace = sample_trace(g, params, k, 9000 + trial);
            const auto est =
                estimate_hidden_static(trace, estimate_direct_static(trace), 1);
            hits += est.hidden_arcs() == g.hidden_arcs();
        }
        freq.push_back(static_cast<double>(hits) / trials);
    }
    for (std::size_t i = 1; i < freq.size(); ++i) CHECK(freq[i] >= freq[i - 1] - 0.08);
    CHECK(freq.back() >= 0.9);
}

TEST_CASE("robust estimator consumes the estimated neighborhood") {
    // direct edge {0,1} plus a hidden edge (2->1): the pipeline must
    // screen node 0 out of node 1's sessions via the direct estimate
    ModelParams params = base_params(0.5, 2, 1, 0.6);
    params.channel = ChannelMode::random_channel;
    params.p_fade = 0.05;
    params.q_low = 0.0;
    params.q_up = 1.0;
    const auto g = InterferenceGraph::create(3, {{0, 1}}, {{{2, 1}, 0.7}}, {}, {}, params);
    const auto trace = sample_trace(g, params, 60000, 77);
    const auto d_est = estimate_direct_robust(trace, 0.03);
    CHECK(d_est == g.direct_edges());
    const auto est = estimate_hidden_robust(trace, d_est, params);
    CHECK(est.hidden_arcs() == g.hidden_arcs());
}
