#pragma once

#include <vector>

#include "confgraph/graph.hpp"
#include "confgraph/trace.hpp"

namespace confgraph {

// Empirical co-transmission frequencies: entry (i,j) is the fraction of
// sessions with both nodes active; the diagonal holds each node's own
// activation frequency.
std::vector<std::vector<double>> cooccurrence(const SessionTrace& trace, bool parallel = true);
std::vector<std::vector<double>> cooccurrence_serial(const SessionTrace& trace);

// Static-channel estimator: keep exactly the pairs never observed
// transmitting together. Never misses a true edge; converges to the
// true edge set as k grows.
std::vector<NodePair> estimate_direct_static(const SessionTrace& trace);

// Random-channel estimator: drop every pair whose co-transmission
// frequency reaches epsilon (inclusive).
std::vector<NodePair> estimate_direct_robust(const SessionTrace& trace, double epsilon);

}  // namespace confgraph
