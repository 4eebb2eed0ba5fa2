#include "confgraph/sim.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace confgraph {

std::vector<std::uint8_t> resolve_transmissions(const SessionInputs& inputs,
                                                const InterferenceGraph& graph) {
    const int n = graph.n();
    if (static_cast<int>(inputs.queued.size()) != n ||
        static_cast<int>(inputs.backoff.size()) != n)
        throw std::invalid_argument("resolve_transmissions: input size mismatch");
    if (inputs.sense_ok.size() != graph.direct_edges().size())
        throw std::invalid_argument("resolve_transmissions: sensing realization size mismatch");

    // Sensing lookup for the few suppressing pairs of this session.
    // Edge index per adjacency would be overkill at these sizes.
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (inputs.backoff[a] != inputs.backoff[b]) return inputs.backoff[a] < inputs.backoff[b];
        return a < b;  // measure-zero tie, broken by index
    });

    const auto& edges = graph.direct_edges();
    auto sensed = [&](int i, int j) {
        const NodePair key = make_pair_sorted(i, j);
        const auto it = std::lower_bound(edges.begin(), edges.end(), key);
        return inputs.sense_ok[static_cast<std::size_t>(it - edges.begin())] != 0;
    };

    std::vector<std::uint8_t> x(n, 0);
    for (const int i : order) {
        if (!inputs.queued[i]) continue;
        bool suppressed = false;
        for (const int j : graph.neighbors(i)) {
            if (x[j] && sensed(i, j)) {
                suppressed = true;
                break;
            }
        }
        if (!suppressed) x[i] = 1;
    }
    return x;
}

std::vector<Feedback> resolve_feedback(const std::vector<std::uint8_t>& x,
                                       const InterferenceGraph& graph,
                                       const rng::SessionRng& session) {
    const int n = graph.n();
    if (static_cast<int>(x.size()) != n)
        throw std::invalid_argument("resolve_feedback: activation size mismatch");

    std::vector<Feedback> y(n, Feedback::idle);
    for (int j = 0; j < n; ++j) {
        if (!x[j]) continue;
        bool nack = false;

        const double pf = graph.fade_prob(j);
        if (pf > 0.0 && session.uniform(rng::Draw::fade, j) < pf) nack = true;

        if (!nack) {
            if (graph.non_compounding()) {
                double pmax = 0.0;
                for (const auto& [i, pij] : graph.hidden_in(j))
                    if (x[i]) pmax = std::max(pmax, pij);
                if (pmax > 0.0 && session.uniform(rng::Draw::noncomp, j) < pmax) nack = true;
            } else {
                for (const auto& [i, pij] : graph.hidden_in(j)) {
                    if (x[i] && session.uniform(rng::Draw::collision, i, j) < pij) {
                        nack = true;
                        break;
                    }
                }
            }
        }

        if (!nack) {
            // A co-transmitting direct neighbor (possible only when its
            // sensing draw failed) collides with certainty.
            for (const int i : graph.neighbors(j)) {
                if (x[i]) {
                    nack = true;
                    break;
                }
            }
        }
        y[j] = nack ? Feedback::nack : Feedback::ack;
    }
    return y;
}

SessionInputs draw_session_inputs(const InterferenceGraph& graph, const ModelParams& params,
                                  const TrafficSpec& traffic, const rng::SessionRng& session) {
    const int n = graph.n();
    SessionInputs in;
    in.queued.resize(n);
    in.backoff.resize(n);
    for (int i = 0; i < n; ++i) {
        const double p =
            traffic.rate.empty() ? params.p : traffic.rate[static_cast<std::size_t>(i)];
        in.queued[i] = session.uniform(rng::Draw::traffic, i) < p ? 1 : 0;
        in.backoff[i] = params.backoff_window * session.uniform(rng::Draw::backoff, i);
    }
    const auto& edges = graph.direct_edges();
    in.sense_ok.resize(edges.size());
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto [i, j] = edges[e];
        const double q = graph.sensing_fail(i, j);
        in.sense_ok[e] = session.uniform(rng::Draw::sense, i, j) >= q ? 1 : 0;
    }
    return in;
}

std::vector<std::uint8_t> simulate_session_x(const InterferenceGraph& graph,
                                             const ModelParams& params,
                                             const TrafficSpec& traffic, std::uint64_t seed,
                                             std::uint64_t t, QueueState* queues,
                                             std::vector<Feedback>* y_out) {
    const rng::SessionRng session{seed, t};
    SessionInputs in;
    if (traffic.mode == TrafficSpec::Mode::queued) {
        if (queues == nullptr)
            throw std::invalid_argument("simulate_session: queued traffic needs queue state");
        const int n = graph.n();
        in.queued.resize(n);
        in.backoff.resize(n);
        for (int i = 0; i < n; ++i) {
            const double lambda =
                traffic.rate.empty() ? params.p : traffic.rate[static_cast<std::size_t>(i)];
            queues->backlog[i] += rng::poisson(lambda, session.uniform(rng::Draw::arrival, i));
            in.queued[i] = queues->backlog[i] > 0 ? 1 : 0;
            in.backoff[i] = params.backoff_window * session.uniform(rng::Draw::backoff, i);
        }
        const auto& edges = graph.direct_edges();
        in.sense_ok.resize(edges.size());
        for (std::size_t e = 0; e < edges.size(); ++e) {
            const auto [i, j] = edges[e];
            in.sense_ok[e] = session.uniform(rng::Draw::sense, i, j) >= graph.sensing_fail(i, j)
                                 ? 1
                                 : 0;
        }
    } else {
        in = draw_session_inputs(graph, params, traffic, session);
    }

    auto x = resolve_transmissions(in, graph);
    const auto y = resolve_feedback(x, graph, session);
    if (traffic.mode == TrafficSpec::Mode::queued) {
        for (int i = 0; i < graph.n(); ++i)
            if (y[i] == Feedback::ack) --queues->backlog[i];
    }
    if (y_out != nullptr) *y_out = y;
    return x;
}

void simulate_session(const InterferenceGraph& graph, const ModelParams& params,
                      const TrafficSpec& traffic, std::uint64_t seed, std::uint64_t t,
                      QueueState* queues, SessionTrace& trace, std::uint64_t slot) {
    std::vector<Feedback> y;
    const auto x = simulate_session_x(graph, params, traffic, seed, t, queues, &y);
    for (int i = 0; i < graph.n(); ++i)
        trace.set(slot, i, x[i] != 0, y[i] == Feedback::nack);
}

SessionTrace sample_trace_serial(const InterferenceGraph& graph, const ModelParams& params,
                                 std::uint64_t k, std::uint64_t seed,
                                 const TrafficSpec& traffic) {
    if (k == 0) throw std::invalid_argument("sample_trace: k must be >= 1");
    params.validate();
    if (!traffic.rate.empty() &&
        static_cast<int>(traffic.rate.size()) != graph.n())
        throw std::invalid_argument("sample_trace: per-node rate size mismatch");

    SessionTrace trace(k, graph.n());
    QueueState queues{std::vector<std::uint64_t>(graph.n(), 0)};
    for (std::uint64_t t = 0; t < k; ++t)
        simulate_session(graph, params, traffic, seed, t, &queues, trace, t);
    return trace;
}

SessionTrace sample_trace(const InterferenceGraph& graph, const ModelParams& params,
                          std::uint64_t k, std::uint64_t seed, const TrafficSpec& traffic,
                          bool parallel) {
    if (traffic.mode == TrafficSpec::Mode::queued || !parallel)
        return sample_trace_serial(graph, params, k, seed, traffic);
    if (k == 0) throw std::invalid_argument("sample_trace: k must be >= 1");
    params.validate();
    if (!traffic.rate.empty() &&
        static_cast<int>(traffic.rate.size()) != graph.n())
        throw std::invalid_argument("sample_trace: per-node rate size mismatch");

    SessionTrace trace(k, graph.n());
    const std::int64_t blocks = static_cast<std::int64_t>((k + 63) / 64);

    // Sessions are independent; parallelize over 64-session blocks so
    // each thread owns whole words of the column bit vectors.
#pragma omp parallel for schedule(static)
    for (std::int64_t blk = 0; blk < blocks; ++blk) {
        const std::uint64_t t0 = static_cast<std::uint64_t>(blk) * 64;
        const std::uint64_t t1 = std::min<std::uint64_t>(t0 + 64, k);
        for (std::uint64_t t = t0; t < t1; ++t)
            simulate_session(graph, params, traffic, seed, t, nullptr, trace, t);
    }
    return trace;
}

}  // namespace confgraph
