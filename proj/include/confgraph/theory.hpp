#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "confgraph/graph.hpp"

namespace confgraph {

// Exact nonnegative rational, kept reduced.
struct Rational {
    std::uint64_t num = 0;
    std::uint64_t den = 1;
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    friend bool operator==(const Rational&, const Rational&) = default;
};

Rational make_rational(std::uint64_t num, std::uint64_t den);

// Probability that, among node i with a competitors, node j with b
// competitors (b counts j's competitors that are not i's), and the
// m = a + b distinct competitors overall, both i and j come first
// within their own competitor groups when all m+2 backoff times are
// ranked. Exact rational; equals 1/((a+1)(b+1)).
Rational backoff_order_prob(int a, int b, int m);

// Stationary channel-occupancy distribution of one clique under the
// session model: P(idle) = (1-p)^m, each of the m members wins with
// the same residual probability.
struct CliqueDist {
    double idle = 0.0;
    double per_node = 0.0;
};
CliqueDist clique_pattern_dist(double p, int clique_size);

// Coefficients of the two-clique pattern distribution after joining
// one node of each clique by an extra edge (cliques of size d-1):
//   q      probability a given clique node occupies the channel
//   beta1  probability mass moved onto each "solo transmitter" pattern
//   beta2  mass moved onto each cross pattern avoiding the joined pair
// Mass conservation: 2*beta1 + 2*(d-2)*beta2 = q^2.
struct CliquePairCoeffs {
    double q = 0.0;
    double beta1 = 0.0;
    double beta2 = 0.0;
};
CliquePairCoeffs beta_coefficients(double p, int d);

// KL divergence between the perturbed and the independent two-clique
// pattern distributions, with its closed-form upper bound
// (2 + 1/(1-p)) / (d-1)^2.
struct KlPair {
    double exact = 0.0;
    double upper_bound = 0.0;
};
KlPair kl_direct_pair(double p, int d);

// Sample-complexity bounds. The "sufficient" kinds return the smallest
// integer k meeting the guarantee; the "minimax" kinds return the k
// threshold below which the stated error floor applies.
enum class Bound {
    direct_static_sufficient,   // eliminate-on-co-occurrence estimator
    direct_minimax_threshold,   // no estimator can beat the floor below this k
    hidden_static_sufficient,   // minimum-hitting-set estimator
    hidden_minimax_threshold,
    robust_direct_sufficient,   // thresholded co-occurrence estimator
    robust_hidden_sufficient,   // ratio-threshold estimator
};

struct BoundInputs {
    int n = 0;
    int d = 0;
    int s = 1;
    double p = 0.0;
    double p_min = 0.0;
    double p_fade = 0.0;
    double q_low = 0.0;
    double q_up = 1.0;
    double c3 = 1.0;
    double delta = 0.0;           // target failure probability (sufficient bounds)
    double gamma = 0.0;           // target failure probability (robust hidden)
    double alpha_tsybakov = 0.0;  // hypothesis-test constant, in (0, 1/8)
    double c1 = 0.0, c2 = 0.0;    // scaling constants of the hidden minimax bound
};

struct BoundValue {
    double k = 0.0;  // sufficient k (integer) or real threshold
    std::optional<double> epsilon;        // robust direct/hidden co-occurrence threshold
    std::optional<double> ratio_delta;    // robust hidden ratio threshold
    std::optional<double> delta_w;        // robust hidden concentration margin
    std::optional<double> error_floor;    // minimax bounds
    std::optional<double> family_size;    // minimax bounds: M
};

BoundValue sample_complexity(Bound which, const BoundInputs& in);

// All six bounds for one parameter set as CSV; bounds whose
// preconditions fail get status "error" and the reason.
std::string bounds_table_csv(const BoundInputs& in);

// Disconnected-cliques family: base graph of ceil(n/(d-1)) cliques
// (the first floor(n/(d-1)) of size d-1) plus n single-extra-edge
// perturbations joining nodes of distinct full cliques, enumerated in
// lexicographic pair order.
struct CliqueFamily {
    InterferenceGraph base;
    std::vector<InterferenceGraph> perturbed;
    int full_cliques = 0;  // m0
    int clique_size = 0;   // d-1
    std::vector<std::vector<int>> cliques;  // node lists, full cliques first
};
CliqueFamily gen_clique_family(int n, int d);

// Group family: groups of two d-cliques plus s-1 detached nodes; every
// clique node is hidden-interfered by the group's detached nodes and by
// the lowest-index node of the opposite clique, all with weight p_min
// and non-compounding collisions. Perturbations each drop one
// cross-clique hidden edge.
struct GroupFamily {
    InterferenceGraph base;
    std::vector<InterferenceGraph> perturbed;
    int full_groups = 0;
    int group_size = 0;  // 2d + s - 1
    int family_size = 0; // M
};
GroupFamily gen_group_family(int n, int d, int s, double p_min, double c1, double c2);

}  // namespace confgraph
