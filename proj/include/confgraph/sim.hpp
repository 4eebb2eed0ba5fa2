#pragma once

#include <cstdint>
#include <vector>

#include "confgraph/graph.hpp"
#include "confgraph/rng.hpp"
#include "confgraph/trace.hpp"

namespace confgraph {

// One session's exogenous randomness: queue indicators, continuous
// backoff times and the per-direct-edge sensing outcome. Sensing
// between pairs that share no direct edge never suppresses anyone, so
// only the direct edges carry a realization (indexed like
// graph.direct_edges()).
struct SessionInputs {
    std::vector<std::uint8_t> queued;
    std::vector<double> backoff;
    std::vector<std::uint8_t> sense_ok;
};

// Contention outcome for one session. Nodes are processed in backoff
// order (ties broken by index); a node transmits iff it has traffic and
// senses no already-transmitting direct neighbor this session. Nodes
// without traffic neither transmit nor suppress.
std::vector<std::uint8_t> resolve_transmissions(const SessionInputs& inputs,
                                                const InterferenceGraph& graph);

// ACK/NACK outcome for one session. A transmission fails on a fade
// draw, on an independent collision draw per active hidden interferer
// (or a single draw when the graph is non-compounding), or with
// certainty when a direct neighbor transmitted in the same session.
std::vector<Feedback> resolve_feedback(const std::vector<std::uint8_t>& x,
                                       const InterferenceGraph& graph,
                                       const rng::SessionRng& session);

struct TrafficSpec {
    enum class Mode { bernoulli, queued } mode = Mode::bernoulli;
    // Per-node Bernoulli probability or Poisson arrival rate; empty
    // means Bernoulli(params.p) for every node.
    std::vector<double> rate;
};

SessionInputs draw_session_inputs(const InterferenceGraph& graph, const ModelParams& params,
                                  const TrafficSpec& traffic, const rng::SessionRng& session);

// k i.i.d. sessions (Bernoulli traffic) or a queued-arrivals run.
// Identical seeds give bit-identical traces; in Bernoulli mode the
// first k' sessions of a k-session trace equal a k'-session trace.
SessionTrace sample_trace(const InterferenceGraph& graph, const ModelParams& params,
                          std::uint64_t k, std::uint64_t seed,
                          const TrafficSpec& traffic = {}, bool parallel = true);

SessionTrace sample_trace_serial(const InterferenceGraph& graph, const ModelParams& params,
                                 std::uint64_t k, std::uint64_t seed,
                                 const TrafficSpec& traffic = {});

// Queue state for incremental simulation (queued traffic carries
// backlog across sessions; lost packets stay at the head).
struct QueueState {
    std::vector<std::uint64_t> backlog;
};

// Simulates session t and returns the activation vector; fills *y_out
// when given. Queued traffic advances the backlog in *queues.
std::vector<std::uint8_t> simulate_session_x(const InterferenceGraph& graph,
                                             const ModelParams& params,
                                             const TrafficSpec& traffic, std::uint64_t seed,
                                             std::uint64_t t, QueueState* queues,
                                             std::vector<Feedback>* y_out = nullptr);

// Same, writing the outcome into trace row `slot` (normally t).
void simulate_session(const InterferenceGraph& graph, const ModelParams& params,
                      const TrafficSpec& traffic, std::uint64_t seed, std::uint64_t t,
                      QueueState* queues, SessionTrace& trace, std::uint64_t slot);

}  // namespace confgraph
