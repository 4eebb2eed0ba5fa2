#pragma once

#include <optional>
#include <vector>

#include "confgraph/graph.hpp"
#include "confgraph/trace.hpp"

namespace confgraph {

// For a target node j: one set of candidate interferers (the other
// active nodes) per failed session, in session order.
struct CandidateCollection {
    int target = -1;
    std::vector<std::uint64_t> nack_sessions;  // session indices with Y_j = N
    std::vector<BitVec> sets;                  // candidate set per failed session
};

CandidateCollection collect_candidates(const SessionTrace& trace, int j);

// Smallest subset of `allowed` (size <= max_size) intersecting every
// set in the collection; lexicographically smallest among equal-size
// minimizers. Empty collection -> empty set. nullopt when no hitting
// set of the allowed size exists. The result is re-verified before it
// is returned.
std::optional<std::vector<int>> min_hitting_set(const std::vector<BitVec>& sets,
                                                const std::vector<int>& allowed, int max_size);

// Static-channel hidden-edge estimator: per target node, the minimum
// hitting set of its candidate collections, searched over nodes
// non-adjacent to it in the direct estimate. Targets without a hitting
// set of size <= s_cap are flagged and contribute no edges. Setting
// restrict_to_nonadjacent = false searches over all other nodes.
EstimationResult estimate_hidden_static(const SessionTrace& trace,
                                        const std::vector<NodePair>& direct_estimate, int s_cap,
                                        bool restrict_to_nonadjacent = true);

// Counting specialization for the single-interferer regime: the lowest
// indexed node active in every failed session of the target.
EstimationResult estimate_hidden_s1(const SessionTrace& trace);

// Minimum conditional failure ratio over screening sets S (|S| <=
// s_cap) drawn from outside neighbors_j and {i, j}: of the sessions
// where i and j transmit while S and the neighbors stay silent, the
// fraction that failed. nullopt when every screening set has an empty
// denominator.
std::optional<double> p_hat(const SessionTrace& trace, int i, int j, const BitVec& neighbors_j,
                            int s_cap);

// Random-channel hidden-edge estimator: declare (i -> j) when the
// minimized ratio reaches (p_min + p_fade)/2. Pairs with no usable
// sessions are flagged as insufficient data.
EstimationResult estimate_hidden_robust(const SessionTrace& trace,
                                        const std::vector<NodePair>& direct_estimate,
                                        const ModelParams& params, bool parallel = true);

}  // namespace confgraph
