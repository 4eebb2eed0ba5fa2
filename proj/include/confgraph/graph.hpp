#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "confgraph/bitvec.hpp"

namespace confgraph {

// Unordered node pair, stored with first < second.
using NodePair = std::pair<int, int>;
// Directed pair (source -> target).
using Arc = std::pair<int, int>;

inline NodePair make_pair_sorted(int i, int j) {
    return i < j ? NodePair{i, j} : NodePair{j, i};
}

enum class ChannelMode { static_channel, random_channel };

// Model constants shared by the sampler, the estimators and the bound
// formulas. Validation rejects any combination outside the admissible
// ranges; random mode additionally requires separable sensing-failure
// probabilities and a fade bound below the weakest real interferer.
struct ModelParams {
    double p = 0.5;              // per-session traffic probability
    double backoff_window = 1.0; // W; only the scale of the backoff draw
    int d = 1;                   // direct degree cap: d_i <= d-1
    int s = 1;                   // hidden in-degree cap: s_j <= s
    double p_min = 0.5;          // lower bound on hidden collision probabilities
    double p_fade = 0.0;         // upper bound on per-node fade probabilities
    double q_low = 0.0;          // sensing failure on direct edges is <= q_low
    double q_up = 1.0;           // sensing failure elsewhere is >= q_up
    double c3 = 1.0;             // separation constant: q_up >= c3*d^2*q_low
    ChannelMode channel = ChannelMode::static_channel;

    void validate() const;  // throws std::invalid_argument naming the rule
};

struct EstimationFlag {
    int node = -1;
    std::string reason;
};

// Output of the hidden-interference estimators (plus the composed
// direct estimate when a pipeline fills it in).
struct EstimationResult {
    int n = 0;
    std::vector<NodePair> direct;
    std::vector<std::pair<Arc, double>> hidden;  // (i->j), associated statistic
    std::vector<std::vector<double>> pair_stat;  // co-occurrence or ratio matrix
    std::vector<EstimationFlag> flags;

    std::vector<Arc> hidden_arcs() const {
        std::vector<Arc> out;
        out.reserve(hidden.size());
        for (const auto& [arc, w] : hidden) out.push_back(arc);
        return out;
    }
};

// Ground-truth interference graph: undirected carrier-sensing edges,
// weighted directed hidden edges, per-node fade probabilities and
// pairwise sensing-failure probabilities. Immutable after creation;
// creation validates every structural invariant and the degree/weight
// caps of the ModelParams it was built against.
class InterferenceGraph {
public:
    static InterferenceGraph create(int n,
                                    std::vector<NodePair> direct,
                                    std::vector<std::pair<Arc, double>> hidden,
                                    std::vector<double> fade,
                                    std::vector<std::pair<NodePair, double>> sensing_overrides,
                                    ModelParams params,
                                    bool non_compounding = false);

    int n() const { return n_; }
    const ModelParams& params() const { return params_; }
    bool non_compounding() const { return non_compounding_; }

    const std::vector<NodePair>& direct_edges() const { return direct_; }
    bool adjacent(int i, int j) const { return neighbor_mask_[i].test(j); }
    const std::vector<int>& neighbors(int i) const { return neighbors_[i]; }
    const BitVec& neighbor_mask(int i) const { return neighbor_mask_[i]; }

    // p_ij; zero for pairs without a hidden edge (including direct pairs).
    double hidden_p(int i, int j) const;
    const std::vector<std::pair<int, double>>& hidden_in(int j) const { return hidden_in_[j]; }
    std::vector<std::pair<Arc, double>> hidden_edges() const;
    std::vector<Arc> hidden_arcs() const;

    double fade_prob(int j) const { return fade_[j]; }
    // q_ij; defaults to 0 on direct edges and 1 elsewhere unless overridden.
    double sensing_fail(int i, int j) const;
    const std::vector<std::pair<NodePair, double>>& sensing_overrides() const {
        return sensing_overrides_;
    }

    int degree(int i) const { return static_cast<int>(neighbors_[i].size()); }
    int max_direct_degree() const;
    int hidden_indegree(int j) const { return static_cast<int>(hidden_in_[j].size()); }
    int max_hidden_indegree() const;

private:
    int n_ = 0;
    ModelParams params_;
    bool non_compounding_ = false;
    std::vector<NodePair> direct_;
    std::vector<std::vector<int>> neighbors_;
    std::vector<BitVec> neighbor_mask_;
    std::vector<std::vector<std::pair<int, double>>> hidden_in_;  // per target, sorted by source
    std::vector<double> fade_;
    std::vector<std::pair<NodePair, double>> sensing_overrides_;  // sorted
};

// True iff both edge sets match exactly (weights ignored, hidden edges
// compared as directed pairs). Throws on mismatched node counts.
bool graph_equal(const InterferenceGraph& a, const InterferenceGraph& b);

// Number of edge insertions/deletions turning a into b.
int edit_distance(const InterferenceGraph& a, const InterferenceGraph& b);

int edit_distance_sets(const std::vector<NodePair>& da, const std::vector<Arc>& ha,
                       const std::vector<NodePair>& db, const std::vector<Arc>& hb);

// Line-oriented text form: "n=<int>", optional "NC 1", then "D i j",
// "H i j p", "F j p", "Q i j q" records in ascending index order.
// Writing and re-parsing reproduces the text byte for byte.
std::string graph_to_text(const InterferenceGraph& g);
InterferenceGraph graph_from_text(const std::string& text);

std::string estimation_to_text(const EstimationResult& r);

}  // namespace confgraph
