#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "confgraph/graph.hpp"

namespace confgraph {

struct PathLossParams {
    double gamma_l0_dbm = 0.0;   // received power at the reference distance
    double alpha_pathloss = 4.0; // path-loss exponent
    double sigma2_db = 3.0;      // shadowing variance
    double l0_m = 1000.0;        // reference distance
};

// Log-distance model, base-10: gamma(l0) - 10*alpha*log10(l/l0) + shadow.
double received_power(const PathLossParams& params, double distance_m, double shadow_db);

struct Point {
    double x = 0.0, y = 0.0;
};

// A grid deployment: one AP per cell, several clients per cell, each
// client associated with its nearest AP, and frozen shadowing draws for
// every AP-AP and AP-client pair.
struct Topology {
    int rows = 0, cols = 0;
    double cell_side_m = 0.0;
    int clients_per_cell = 0;
    PathLossParams pathloss;
    double cs_range_m = 0.0;
    double cs_threshold_dbm = 0.0;
    double int_threshold_dbm = 0.0;
    std::uint64_t seed = 0;

    std::vector<Point> ap;
    std::vector<Point> client;
    std::vector<int> client_ap;              // nearest-AP association
    std::vector<double> shadow_ap_ap;        // packed upper triangle
    std::vector<double> shadow_ap_client;    // n_ap * n_client

    int n_ap() const { return static_cast<int>(ap.size()); }
    int n_client() const { return static_cast<int>(client.size()); }
    double ap_ap_shadow(int i, int j) const;
    double ap_client_shadow(int i, int c) const { return shadow_ap_client[i * client.size() + c]; }
    std::vector<int> clients_of(int i) const;
};

Topology gen_topology(int rows, int cols, double cell_side_m, int clients_per_cell,
                      const PathLossParams& pathloss, double cs_range_m, std::uint64_t seed,
                      std::optional<double> int_threshold_dbm = std::nullopt);

struct GeoDeriveOptions {
    double packets_per_client = 0.1;  // Poisson arrivals per client per session
    double p_min = 0.3;               // weight floor the estimators are tuned for
    double fade_margin_db = 0.0;      // random mode: fade when shadowing drops this far
};

struct DerivedGraph {
    InterferenceGraph graph;
    std::vector<double> bernoulli_intensity;  // 1 - exp(-rate) per AP
    std::vector<double> arrival_rate;         // packets per session per AP
    std::vector<EstimationFlag> flags;        // zero-client APs, sub-threshold edges
};

// Ground truth from geometry. Static mode freezes the shadowing and
// compares frozen powers against the carrier-sense threshold; random
// mode turns shadowing into per-session sensing failures (Gaussian CDF)
// and averages client coverage into the edge weights, dropping pairs
// below the configured weight floor.
DerivedGraph derive_graph(const Topology& topology, ChannelMode mode,
                          const GeoDeriveOptions& options = {});

// CSV with a "# key=value" parameter block, then kind,id,x,y,assoc rows.
std::string topology_to_csv(const Topology& topology);
Topology topology_from_csv(const std::string& csv);

}  // namespace confgraph
