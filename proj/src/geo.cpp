#include "confgraph/geo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "confgraph/rng.hpp"

namespace confgraph {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double dist(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

std::size_t tri_index(int i, int j, int n) {
    if (i > j) std::swap(i, j);
    return static_cast<std::size_t>(i) * n - static_cast<std::size_t>(i) * (i + 1) / 2 +
           (j - i - 1);
}

constexpr std::uint64_t kTagApX = 11, kTagApY = 12, kTagClientX = 13, kTagClientY = 14,
                        kTagShadowAp = 15, kTagShadowClient = 16;

// Cells are drawn and numbered column major and keyed by their grid
// coordinates, so widening a grid extends it: the first r*c nodes of a
// wider grid are exactly the narrower grid, with the same draws.
constexpr std::uint64_t cell_code(int r, int c) {
    return static_cast<std::uint64_t>(r) * 65536u + static_cast<std::uint64_t>(c);
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

double received_power(const PathLossParams& params, double distance_m, double shadow_db) {
    if (!(distance_m > 0.0)) fail("received_power: distance must be positive");
    return params.gamma_l0_dbm - 10.0 * params.alpha_pathloss * std::log10(distance_m / params.l0_m) +
           shadow_db;
}

double Topology::ap_ap_shadow(int i, int j) const {
    return shadow_ap_ap[tri_index(i, j, n_ap())];
}

std::vector<int> Topology::clients_of(int i) const {
    std::vector<int> out;
    for (int c = 0; c < n_client(); ++c)
        if (client_ap[c] == i) out.push_back(c);
    return out;
}

Topology gen_topology(int rows, int cols, double cell_side_m, int clients_per_cell,
                      const PathLossParams& pathloss, double cs_range_m, std::uint64_t seed,
                      std::optional<double> int_threshold_dbm) {
    if (rows < 1 || cols < 1) fail("gen_topology: grid dimensions must be positive");
    if (!(cell_side_m > 0.0)) fail("gen_topology: cell side must be positive");
    if (clients_per_cell < 0) fail("gen_topology: negative client count");
    if (!(cs_range_m > 0.0)) fail("gen_topology: carrier-sense range must be positive");
    if (!(pathloss.sigma2_db >= 0.0)) fail("gen_topology: shadow variance must be >= 0");

    Topology topo;
    topo.rows = rows;
    topo.cols = cols;
    topo.cell_side_m = cell_side_m;
    topo.clients_per_cell = clients_per_cell;
    topo.pathloss = pathloss;
    topo.cs_range_m = cs_range_m;
    topo.seed = seed;
    topo.cs_threshold_dbm = received_power(pathloss, cs_range_m, 0.0);
    topo.int_threshold_dbm = int_threshold_dbm.value_or(topo.cs_threshold_dbm);

    const int n = rows * cols;
    topo.ap.resize(n);
    std::vector<std::uint64_t> code(n);
    for (int c = 0; c < cols; ++c) {
        for (int r = 0; r < rows; ++r) {
            const int cell = c * rows + r;
            code[cell] = cell_code(r, c);
            topo.ap[cell].x = (c + rng::uniform(seed, kTagApX, r, c)) * cell_side_m;
            topo.ap[cell].y = (r + rng::uniform(seed, kTagApY, r, c)) * cell_side_m;
        }
    }

    topo.client.resize(static_cast<std::size_t>(n) * clients_per_cell);
    topo.client_ap.resize(topo.client.size());
    for (int cell = 0; cell < n; ++cell) {
        const int c = cell / rows, r = cell % rows;
        for (int m = 0; m < clients_per_cell; ++m) {
            const int id = cell * clients_per_cell + m;
            topo.client[id].x = (c + rng::uniform(seed, kTagClientX, r, c, m)) * cell_side_m;
            topo.client[id].y = (r + rng::uniform(seed, kTagClientY, r, c, m)) * cell_side_m;
            int best = 0;
            double best_d = dist(topo.client[id], topo.ap[0]);
            for (int i = 1; i < n; ++i) {
                const double d = dist(topo.client[id], topo.ap[i]);
                if (d < best_d) {
                    best_d = d;
                    best = i;
                }
            }
            topo.client_ap[id] = best;
        }
    }

    const double sigma = std::sqrt(pathloss.sigma2_db);
    topo.shadow_ap_ap.resize(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            topo.shadow_ap_ap[tri_index(i, j, n)] =
                sigma * rng::normal(seed, kTagShadowAp, code[i], code[j]);
    topo.shadow_ap_client.resize(static_cast<std::size_t>(n) * topo.client.size());
    for (int i = 0; i < n; ++i) {
        for (std::size_t cl = 0; cl < topo.client.size(); ++cl) {
            const std::uint64_t client_cell = code[cl / clients_per_cell];
            topo.shadow_ap_client[i * topo.client.size() + cl] =
                sigma * rng::normal(seed, kTagShadowClient, code[i], client_cell,
                                    cl % clients_per_cell);
        }
    }
    return topo;
}

DerivedGraph derive_graph(const Topology& topo, ChannelMode mode,
                          const GeoDeriveOptions& options) {
    const int n = topo.n_ap();
    if (n == 0) fail("derive_graph: empty topology");
    if (!(options.p_min > 0.0 && options.p_min < 1.0))
        fail("derive_graph: p_min must be in (0,1)");

    const double sigma = std::sqrt(topo.pathloss.sigma2_db);
    std::vector<EstimationFlag> flags;

    std::vector<NodePair> direct;
    std::vector<std::pair<NodePair, double>> overrides;
    std::vector<BitVec> adj(n, BitVec(n));
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double d = dist(topo.ap[i], topo.ap[j]);
            if (mode == ChannelMode::static_channel) {
                const double power = received_power(topo.pathloss, d, topo.ap_ap_shadow(i, j));
                if (power >= topo.cs_threshold_dbm) {
                    direct.push_back({i, j});
                    adj[i].set(j);
                    adj[j].set(i);
                }
            } else {
                const double mean = received_power(topo.pathloss, d, 0.0);
                // Edge membership follows the deterministic geometry (the
                // distance-based range); shadowing only decides how often
                // the pair fails to sense.
                const double q = sigma > 0.0 ? normal_cdf((topo.cs_threshold_dbm - mean) / sigma)
                                             : (mean >= topo.cs_threshold_dbm ? 0.0 : 1.0);
                if (mean >= topo.cs_threshold_dbm) {
                    direct.push_back({i, j});
                    adj[i].set(j);
                    adj[j].set(i);
                }
                if (q != 0.0 && q != 1.0) overrides.push_back({{i, j}, q});
            }
        }
    }

    // Hidden edges from client coverage.
    std::vector<std::vector<int>> ap_clients(n);
    for (int c = 0; c < topo.n_client(); ++c) ap_clients[topo.client_ap[c]].push_back(c);
    for (int j = 0; j < n; ++j)
        if (ap_clients[j].empty()) flags.push_back({j, "no associated clients"});

    std::vector<std::pair<Arc, double>> hidden;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j || adj[i].test(j) || ap_clients[j].empty()) continue;
            double p_ij = 0.0;
            if (mode == ChannelMode::static_channel) {
                int covered = 0;
                for (int c : ap_clients[j]) {
                    const double d = dist(topo.ap[i], topo.client[c]);
                    const double power =
                        received_power(topo.pathloss, d, topo.ap_client_shadow(i, c));
                    if (power >= topo.int_threshold_dbm) ++covered;
                }
                p_ij = static_cast<double>(covered) / ap_clients[j].size();
            } else {
                double sum = 0.0;
                for (int c : ap_clients[j]) {
                    const double mean =
                        received_power(topo.pathloss, dist(topo.ap[i], topo.client[c]), 0.0);
                    sum += sigma > 0.0
                               ? 1.0 - normal_cdf((topo.int_threshold_dbm - mean) / sigma)
                               : (mean >= topo.int_threshold_dbm ? 1.0 : 0.0);
                }
                p_ij = sum / ap_clients[j].size();
            }
            if (p_ij <= 0.0) continue;
            if (mode == ChannelMode::random_channel && p_ij < options.p_min) {
                // Averaged coverage is positive for every pair; weights
                // below the floor are reported, not stored.
                flags.push_back({j, "dropped sub-threshold hidden edge " + std::to_string(i) +
                                        "->" + std::to_string(j) + " (p=" + fmt_double(p_ij) +
                                        ")"});
                continue;
            }
            if (p_ij < options.p_min)
                flags.push_back({j, "sub-threshold hidden edge " + std::to_string(i) + "->" +
                                        std::to_string(j) + " (p=" + fmt_double(p_ij) + ")"});
            hidden.push_back({{i, j}, p_ij});
        }
    }

    ModelParams params;
    params.channel = mode;
    params.d = 1;
    std::vector<int> deg(n, 0), indeg(n, 0);
    for (auto [i, j] : direct) {
        ++deg[i];
        ++deg[j];
    }
    for (const auto& [arc, p] : hidden) ++indeg[arc.second];
    for (int v : deg) params.d = std::max(params.d, v + 1);
    params.s = 1;
    for (int v : indeg) params.s = std::max(params.s, v);

    double pmin_seen = 1.0;
    for (const auto& [arc, p] : hidden) pmin_seen = std::min(pmin_seen, p);
    params.p_min = hidden.empty() ? options.p_min : std::min(pmin_seen, 1.0 - 1e-12);

    std::vector<double> fade;
    if (mode == ChannelMode::random_channel) {
        double qlo = 0.0, qup = 1.0;
        for (const auto& [pr, q] : overrides) {
            const bool edge = adj[pr.first].test(pr.second);
            if (edge) qlo = std::max(qlo, q);
            else qup = std::min(qup, q);
        }
        params.q_low = qlo;
        params.q_up = qup;
        params.c3 = 1.0;
        if (options.fade_margin_db > 0.0 && sigma > 0.0) {
            const double pf = normal_cdf(-options.fade_margin_db / sigma);
            if (pf >= params.p_min)
                fail("derive_graph: fade margin gives fade probability above the weight floor");
            params.p_fade = pf;
            fade.assign(n, pf);
        }
    }

    DerivedGraph out{
        InterferenceGraph::create(n, std::move(direct), std::move(hidden), std::move(fade),
                                  std::move(overrides), params),
        {}, {}, std::move(flags)};

    out.bernoulli_intensity.resize(n);
    out.arrival_rate.resize(n);
    for (int i = 0; i < n; ++i) {
        const double rate = options.packets_per_client * ap_clients[i].size();
        out.arrival_rate[i] = rate;
        out.bernoulli_intensity[i] = 1.0 - std::exp(-rate);
    }
    return out;
}

std::string topology_to_csv(const Topology& topo) {
    std::ostringstream out;
    out << "# rows=" << topo.rows << "\n# cols=" << topo.cols << "\n";
    out << "# cell_side_m=" << fmt_double(topo.cell_side_m) << "\n";
    out << "# clients_per_cell=" << topo.clients_per_cell << "\n";
    out << "# gamma_l0_dbm=" << fmt_double(topo.pathloss.gamma_l0_dbm) << "\n";
    out << "# alpha_pathloss=" << fmt_double(topo.pathloss.alpha_pathloss) << "\n";
    out << "# sigma2_db=" << fmt_double(topo.pathloss.sigma2_db) << "\n";
    out << "# l0_m=" << fmt_double(topo.pathloss.l0_m) << "\n";
    out << "# cs_range_m=" << fmt_double(topo.cs_range_m) << "\n";
    out << "# int_threshold_dbm=" << fmt_double(topo.int_threshold_dbm) << "\n";
    out << "# seed=" << topo.seed << "\n";
    out << "kind,id,x,y,assoc\n";
    for (int i = 0; i < topo.n_ap(); ++i)
        out << "ap," << i << ',' << fmt_double(topo.ap[i].x) << ',' << fmt_double(topo.ap[i].y)
            << ",-1\n";
    for (int c = 0; c < topo.n_client(); ++c)
        out << "client," << c << ',' << fmt_double(topo.client[c].x) << ','
            << fmt_double(topo.client[c].y) << ',' << topo.client_ap[c] << "\n";
    return out.str();
}

Topology topology_from_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    int rows = 0, cols = 0, clients_per_cell = 0;
    double cell_side = 0.0, cs_range = 0.0;
    double int_thr = 0.0;
    bool have_int_thr = false;
    PathLossParams pl;
    std::uint64_t seed = 0;
    while (in.peek() == '#' && std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = line.substr(2, eq - 2);
        const std::string val = line.substr(eq + 1);
        if (key == "rows") rows = std::stoi(val);
        else if (key == "cols") cols = std::stoi(val);
        else if (key == "cell_side_m") cell_side = std::stod(val);
        else if (key == "clients_per_cell") clients_per_cell = std::stoi(val);
        else if (key == "gamma_l0_dbm") pl.gamma_l0_dbm = std::stod(val);
        else if (key == "alpha_pathloss") pl.alpha_pathloss = std::stod(val);
        else if (key == "sigma2_db") pl.sigma2_db = std::stod(val);
        else if (key == "l0_m") pl.l0_m = std::stod(val);
        else if (key == "cs_range_m") cs_range = std::stod(val);
        else if (key == "int_threshold_dbm") {
            int_thr = std::stod(val);
            have_int_thr = true;
        } else if (key == "seed") seed = std::stoull(val);
    }
    if (rows < 1 || cols < 1) fail("topology csv: missing grid dimensions");
    // Coordinates and shadowing are functions of the seed; regenerate and
    // confirm the stored coordinates match.
    Topology topo = gen_topology(rows, cols, cell_side, clients_per_cell, pl, cs_range, seed,
                                 have_int_thr ? std::optional<double>(int_thr) : std::nullopt);
    if (!std::getline(in, line) || line != "kind,id,x,y,assoc") fail("topology csv: bad header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string kind, tok;
        std::getline(ls, kind, ',');
        std::getline(ls, tok, ',');
        const int id = std::stoi(tok);
        std::getline(ls, tok, ',');
        const double x = std::stod(tok);
        std::getline(ls, tok, ',');
        const double y = std::stod(tok);
        std::getline(ls, tok, ',');
        const int assoc = std::stoi(tok);
        if (kind == "ap") {
            if (id < 0 || id >= topo.n_ap() || std::abs(topo.ap[id].x - x) > 1e-9 ||
                std::abs(topo.ap[id].y - y) > 1e-9)
                fail("topology csv: AP row inconsistent with seed");
        } else if (kind == "client") {
            if (id < 0 || id >= topo.n_client() || topo.client_ap[id] != assoc)
                fail("topology csv: client row inconsistent with seed");
        } else {
            fail("topology csv: unknown row kind");
        }
    }
    return topo;
}

}  // namespace confgraph
