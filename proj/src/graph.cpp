#include "confgraph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

namespace confgraph {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

void check_node(int v, int n, const char* what) {
    if (v < 0 || v >= n) fail(std::string(what) + ": node index out of range");
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void ModelParams::validate() const {
    if (!(p > 0.0 && p < 1.0)) fail("ModelParams: p must be in (0,1)");
    if (!(backoff_window > 0.0)) fail("ModelParams: backoff window must be positive");
    if (d < 1) fail("ModelParams: d must be >= 1");
    if (s < 1) fail("ModelParams: s must be >= 1");
    if (!(p_min > 0.0 && p_min < 1.0)) fail("ModelParams: p_min must be in (0,1)");
    if (!(p_fade >= 0.0 && p_fade < 1.0)) fail("ModelParams: p_fade must be in [0,1)");
    if (!(q_low >= 0.0 && q_low < q_up && q_up <= 1.0))
        fail("ModelParams: need 0 <= q_low < q_up <= 1");
    if (channel == ChannelMode::random_channel) {
        if (!(c3 >= 1.0)) fail("ModelParams: c3 must be >= 1 in random mode");
        // c3 > 1 declares a separation margin between edge and non-edge
        // sensing failures; c3 == 1 claims none (geometric networks
        // generally have none, and the robust threshold is then chosen
        // empirically rather than from the separation formula).
        if (c3 > 1.0 && q_up < c3 * double(d) * double(d) * q_low)
            fail("ModelParams: random mode with c3 > 1 needs q_up >= c3*d^2*q_low");
        if (!(p_fade < p_min)) fail("ModelParams: random mode needs p_fade < p_min");
    }
}

InterferenceGraph InterferenceGraph::create(int n,
                                            std::vector<NodePair> direct,
                                            std::vector<std::pair<Arc, double>> hidden,
                                            std::vector<double> fade,
                                            std::vector<std::pair<NodePair, double>> sensing_overrides,
                                            ModelParams params,
                                            bool non_compounding) {
    params.validate();
    if (n <= 0) fail("InterferenceGraph: n must be positive");

    InterferenceGraph g;
    g.n_ = n;
    g.params_ = params;
    g.non_compounding_ = non_compounding;

    // Direct edges: canonical order, no self loops, no duplicates.
    for (auto& e : direct) {
        check_node(e.first, n, "direct edge");
        check_node(e.second, n, "direct edge");
        if (e.first == e.second) fail("InterferenceGraph: self loop in direct edges");
        e = make_pair_sorted(e.first, e.second);
    }
    std::sort(direct.begin(), direct.end());
    if (std::adjacent_find(direct.begin(), direct.end()) != direct.end())
        fail("InterferenceGraph: duplicate direct edge");
    g.direct_ = std::move(direct);

    g.neighbors_.assign(n, {});
    g.neighbor_mask_.assign(n, BitVec(n));
    for (const auto& [i, j] : g.direct_) {
        g.neighbors_[i].push_back(j);
        g.neighbors_[j].push_back(i);
        g.neighbor_mask_[i].set(j);
        g.neighbor_mask_[j].set(i);
    }
    for (auto& nb : g.neighbors_) std::sort(nb.begin(), nb.end());

    for (int i = 0; i < n; ++i)
        if (g.degree(i) > params.d - 1)
            fail("InterferenceGraph: direct degree exceeds d-1");

    // Hidden edges: directed, weight in (0,1], p_ij >= p_min, disjoint from E_D.
    g.hidden_in_.assign(n, {});
    std::set<Arc> seen;
    for (const auto& [arc, pij] : hidden) {
        const auto [i, j] = arc;
        check_node(i, n, "hidden edge");
        check_node(j, n, "hidden edge");
        if (i == j) fail("InterferenceGraph: self loop in hidden edges");
        if (!seen.insert(arc).second) fail("InterferenceGraph: duplicate hidden edge");
        if (g.neighbor_mask_[i].test(j))
            fail("InterferenceGraph: hidden edge coincides with a direct edge");
        if (!(pij > 0.0 && pij <= 1.0)) fail("InterferenceGraph: p_ij must be in (0,1]");
        if (pij < params.p_min) fail("InterferenceGraph: p_ij below p_min");
        g.hidden_in_[j].emplace_back(i, pij);
    }
    for (int j = 0; j < n; ++j) {
        auto& in = g.hidden_in_[j];
        std::sort(in.begin(), in.end());
        if (static_cast<int>(in.size()) > params.s)
            fail("InterferenceGraph: hidden in-degree exceeds s");
    }

    if (fade.empty()) fade.assign(n, 0.0);
    if (static_cast<int>(fade.size()) != n) fail("InterferenceGraph: fade vector size mismatch");
    for (double f : fade) {
        if (!(f >= 0.0 && f < 1.0)) fail("InterferenceGraph: fade probability must be in [0,1)");
        if (params.channel == ChannelMode::static_channel && f != 0.0)
            fail("InterferenceGraph: static mode requires zero fade probabilities");
        if (params.channel == ChannelMode::random_channel && f > params.p_fade)
            fail("InterferenceGraph: fade probability above p_fade bound");
    }
    g.fade_ = std::move(fade);

    // Sensing failures: symmetric overrides on the static 0/1 defaults.
    for (auto& [pr, q] : sensing_overrides) {
        check_node(pr.first, n, "sensing override");
        check_node(pr.second, n, "sensing override");
        if (pr.first == pr.second) fail("InterferenceGraph: self pair in sensing overrides");
        pr = make_pair_sorted(pr.first, pr.second);
        if (!(q >= 0.0 && q <= 1.0)) fail("InterferenceGraph: q_ij must be in [0,1]");
    }
    std::sort(sensing_overrides.begin(), sensing_overrides.end());
    for (std::size_t i = 1; i < sensing_overrides.size(); ++i)
        if (sensing_overrides[i].first == sensing_overrides[i - 1].first)
            fail("InterferenceGraph: duplicate sensing override");
    g.sensing_overrides_ = std::move(sensing_overrides);

    for (const auto& [pr, q] : g.sensing_overrides_) {
        const bool edge = g.neighbor_mask_[pr.first].test(pr.second);
        if (edge && q > params.q_low)
            fail("InterferenceGraph: sensing failure on a direct edge exceeds q_low");
        if (!edge && q < params.q_up)
            fail("InterferenceGraph: sensing failure off direct edges below q_up");
    }
    if (params.channel == ChannelMode::static_channel && !g.sensing_overrides_.empty())
        fail("InterferenceGraph: static mode admits no sensing overrides");

    return g;
}

double InterferenceGraph::hidden_p(int i, int j) const {
    check_node(i, n_, "hidden_p");
    check_node(j, n_, "hidden_p");
    for (const auto& [src, p] : hidden_in_[j])
        if (src == i) return p;
    return 0.0;
}

std::vector<std::pair<Arc, double>> InterferenceGraph::hidden_edges() const {
    std::vector<std::pair<Arc, double>> out;
    for (int j = 0; j < n_; ++j)
        for (const auto& [i, p] : hidden_in_[j]) out.push_back({{i, j}, p});
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Arc> InterferenceGraph::hidden_arcs() const {
    std::vector<Arc> out;
    for (int j = 0; j < n_; ++j)
        for (const auto& [i, p] : hidden_in_[j]) out.push_back({i, j});
    std::sort(out.begin(), out.end());
    return out;
}

double InterferenceGraph::sensing_fail(int i, int j) const {
    check_node(i, n_, "sensing_fail");
    check_node(j, n_, "sensing_fail");
    if (i == j) fail("sensing_fail: same node");
    const NodePair key = make_pair_sorted(i, j);
    auto it = std::lower_bound(sensing_overrides_.begin(), sensing_overrides_.end(), key,
                               [](const auto& a, const NodePair& b) { return a.first < b; });
    if (it != sensing_overrides_.end() && it->first == key) return it->second;
    return adjacent(i, j) ? 0.0 : 1.0;
}

int InterferenceGraph::max_direct_degree() const {
    int m = 0;
    for (int i = 0; i < n_; ++i) m = std::max(m, degree(i));
    return m;
}

int InterferenceGraph::max_hidden_indegree() const {
    int m = 0;
    for (int j = 0; j < n_; ++j) m = std::max(m, hidden_indegree(j));
    return m;
}

bool graph_equal(const InterferenceGraph& a, const InterferenceGraph& b) {
    if (a.n() != b.n()) fail("graph_equal: node counts differ");
    return a.direct_edges() == b.direct_edges() && a.hidden_arcs() == b.hidden_arcs();
}

int edit_distance_sets(const std::vector<NodePair>& da, const std::vector<Arc>& ha,
                       const std::vector<NodePair>& db, const std::vector<Arc>& hb) {
    auto sym_diff = [](const auto& x, const auto& y) {
        std::vector<std::pair<int, int>> diff;
        std::set_symmetric_difference(x.begin(), x.end(), y.begin(), y.end(),
                                      std::back_inserter(diff));
        return static_cast<int>(diff.size());
    };
    return sym_diff(da, db) + sym_diff(ha, hb);
}

int edit_distance(const InterferenceGraph& a, const InterferenceGraph& b) {
    if (a.n() != b.n()) fail("edit_distance: node counts differ");
    return edit_distance_sets(a.direct_edges(), a.hidden_arcs(),
                              b.direct_edges(), b.hidden_arcs());
}

std::string graph_to_text(const InterferenceGraph& g) {
    std::ostringstream out;
    out << "n=" << g.n() << "\n";
    if (g.non_compounding()) out << "NC 1\n";
    for (const auto& [i, j] : g.direct_edges()) out << "D " << i << " " << j << "\n";
    for (const auto& [arc, p] : g.hidden_edges())
        out << "H " << arc.first << " " << arc.second << " " << fmt_double(p) << "\n";
    for (int j = 0; j < g.n(); ++j)
        if (g.fade_prob(j) != 0.0) out << "F " << j << " " << fmt_double(g.fade_prob(j)) << "\n";
    for (const auto& [pr, q] : g.sensing_overrides())
        out << "Q " << pr.first << " " << pr.second << " " << fmt_double(q) << "\n";
    return out.str();
}

InterferenceGraph graph_from_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int n = -1;
    bool non_compounding = false;
    std::vector<NodePair> direct;
    std::vector<std::pair<Arc, double>> hidden;
    std::vector<double> fade;
    std::vector<std::pair<NodePair, double>> overrides;

    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        if (n < 0) {
            if (line.rfind("n=", 0) != 0) fail("graph text: missing n= header");
            n = std::stoi(line.substr(2));
            if (n <= 0) fail("graph text: invalid node count");
            fade.assign(n, 0.0);
            continue;
        }
        char kind = 0;
        ls >> kind;
        if (kind == 'N') {  // "NC 1"
            std::string rest;
            ls >> rest;
            non_compounding = true;
        } else if (kind == 'D') {
            int i, j;
            if (!(ls >> i >> j)) fail("graph text: malformed D line");
            direct.push_back({i, j});
        } else if (kind == 'H') {
            int i, j;
            double p;
            if (!(ls >> i >> j >> p)) fail("graph text: malformed H line");
            hidden.push_back({{i, j}, p});
        } else if (kind == 'F') {
            int j;
            double p;
            if (!(ls >> j >> p)) fail("graph text: malformed F line");
            if (j < 0 || j >= n) fail("graph text: F node out of range");
            fade[j] = p;
        } else if (kind == 'Q') {
            int i, j;
            double q;
            if (!(ls >> i >> j >> q)) fail("graph text: malformed Q line");
            overrides.push_back({{i, j}, q});
        } else {
            fail("graph text: unknown record kind");
        }
    }
    if (n < 0) fail("graph text: empty input");

    // Reconstruct the loosest parameter set consistent with the records,
    // so structural invariants are still enforced.
    ModelParams params;
    std::vector<int> deg(n, 0), indeg(n, 0);
    std::set<NodePair> dset;
    for (auto [i, j] : direct) {
        if (i >= 0 && j >= 0 && i < n && j < n && i != j) {
            ++deg[i];
            ++deg[j];
            dset.insert(make_pair_sorted(i, j));
        }
    }
    for (auto& [pr, q] : overrides)
        if (pr.first >= 0 && pr.second >= 0 && pr.first < n && pr.second < n)
            pr = make_pair_sorted(pr.first, pr.second);
    double pmin = 1.0;
    for (const auto& [arc, p] : hidden) {
        if (arc.second >= 0 && arc.second < n) ++indeg[arc.second];
        pmin = std::min(pmin, p);
    }
    params.d = 1;
    for (int v : deg) params.d = std::max(params.d, v + 1);
    params.s = 1;
    for (int v : indeg) params.s = std::max(params.s, v);
    params.p_min = (pmin > 0.0 && pmin < 1.0) ? pmin : 0.5;
    bool any_fade = false;
    double fmax = 0.0;
    for (double f : fade) {
        any_fade |= f != 0.0;
        fmax = std::max(fmax, f);
    }
    if (!overrides.empty() || any_fade) {
        params.channel = ChannelMode::random_channel;
        params.p_fade = fmax;
        // A graph that serialized cleanly had max fade < p_min <= min p_ij;
        // with no hidden edges stored, pick any bound strictly above the fades.
        if (hidden.empty()) params.p_min = (fmax + 1.0) / 2.0;
        double qlo = 0.0, qup = 1.0;
        for (const auto& [pr, q] : overrides) {
            if (dset.count(pr)) qlo = std::max(qlo, q);
            else qup = std::min(qup, q);
        }
        params.q_low = qlo;
        params.q_up = qup;
        params.c3 = 1.0;
    }
    return InterferenceGraph::create(n, std::move(direct), std::move(hidden), std::move(fade),
                                     std::move(overrides), params, non_compounding);
}

std::string estimation_to_text(const EstimationResult& r) {
    std::ostringstream out;
    out << "n=" << r.n << "\n";
    auto direct = r.direct;
    std::sort(direct.begin(), direct.end());
    for (const auto& [i, j] : direct) out << "D " << i << " " << j << "\n";
    auto hidden = r.hidden;
    std::sort(hidden.begin(), hidden.end());
    for (const auto& [arc, w] : hidden)
        out << "H " << arc.first << " " << arc.second << " " << fmt_double(w) << "\n";
    for (const auto& f : r.flags) out << "FLAG " << f.node << " " << f.reason << "\n";
    return out.str();
}

}  // namespace confgraph
