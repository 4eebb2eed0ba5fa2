#include "confgraph/theory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <string>

namespace confgraph {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

double ln_choose2(int n) {
    // log C(n,2)
    return std::log(static_cast<double>(n) * (n - 1) / 2.0);
}

double ceil_k(double v) {
    if (!std::isfinite(v) || v < 0) fail("sample_complexity: bound is not finite");
    return std::ceil(v);
}

}  // namespace

Rational make_rational(std::uint64_t num, std::uint64_t den) {
    if (den == 0) fail("Rational: zero denominator");
    const std::uint64_t g = std::gcd(num, den);
    return {num / g, den / g};
}

Rational backoff_order_prob(int a, int b, int m) {
    if (a < 0 || b < 0) fail("backoff_order_prob: negative competitor count");
    if (m != a + b) fail("backoff_order_prob: competitor union must have m = a + b nodes");
    // C(m+2, a+1) * a! * b! / (m+2)!  ==  1 / ((a+1)(b+1)) after cancellation.
    const std::uint64_t den =
        static_cast<std::uint64_t>(a + 1) * static_cast<std::uint64_t>(b + 1);
    return make_rational(1, den);
}

CliqueDist clique_pattern_dist(double p, int clique_size) {
    if (!(p > 0.0 && p < 1.0)) fail("clique_pattern_dist: p must be in (0,1)");
    if (clique_size < 1) fail("clique_pattern_dist: clique size must be >= 1");
    CliqueDist d;
    d.idle = std::pow(1.0 - p, clique_size);
    d.per_node = (1.0 - d.idle) / clique_size;
    return d;
}

CliquePairCoeffs beta_coefficients(double p, int d) {
    if (!(p > 0.0 && p < 1.0)) fail("beta_coefficients: p must be in (0,1)");
    if (d < 2) fail("beta_coefficients: d must be >= 2");
    CliquePairCoeffs c;
    c.q = (1.0 - std::pow(1.0 - p, d - 1)) / (d - 1);
    double sum = 0.0;
    for (int l = 0; l <= d - 2; ++l) sum += (d - l - 1) * std::pow(1.0 - p, l);
    c.beta1 = sum * p * p * std::pow(1.0 - p, d - 2) / (double(d) * (d - 1));
    // Per-pattern boost onto each of the d-2 cross patterns per side; the
    // total moved mass matches the forbidden pattern's q^2. Size-1 cliques
    // (d == 2) have no such patterns and the boost is identically zero.
    c.beta2 = (d == 2) ? 0.0 : (c.q * c.q - 2.0 * c.beta1) / (2.0 * (d - 2));
    return c;
}

KlPair kl_direct_pair(double p, int d) {
    if (!(p > 0.0 && p < 1.0)) fail("kl_direct_pair: p must be in (0,1)");
    if (d < 3) fail("kl_direct_pair: d must be >= 3");
    const auto c = beta_coefficients(p, d);
    const double idle = std::pow(1.0 - p, d - 1);
    const double solo0 = c.q * idle;            // one clique transmits, other idle
    const double solo1 = solo0 + c.beta1;       // same pattern after the extra edge
    const double cross0 = c.q * c.q;            // both cliques transmit
    const double cross1 = cross0 + c.beta2;

    KlPair out;
    out.exact = 2.0 * solo1 * std::log(solo1 / solo0) +
                2.0 * (d - 2) * cross1 * std::log(cross1 / cross0);
    out.upper_bound = (2.0 + 1.0 / (1.0 - p)) / (double(d - 1) * (d - 1));
    return out;
}

BoundValue sample_complexity(Bound which, const BoundInputs& in) {
    BoundValue out;
    switch (which) {
        case Bound::direct_static_sufficient: {
            if (in.n < 2) fail("sample_complexity: n must be >= 2");
            if (in.d < 1) fail("sample_complexity: d must be >= 1");
            if (!(in.p > 0.0 && in.p < 1.0)) fail("sample_complexity: p must be in (0,1)");
            if (!(in.delta > 0.0 && in.delta < 1.0))
                fail("sample_complexity: delta must be in (0,1)");
            const double rate = -std::log1p(-in.p * in.p / (double(in.d) * in.d));
            out.k = ceil_k((ln_choose2(in.n) + std::log(1.0 / in.delta)) / rate);
            return out;
        }
        case Bound::direct_minimax_threshold: {
            if (in.n < 3) fail("sample_complexity: n must be >= 3");
            const double dmax = (3.0 * in.n - std::sqrt(double(in.n) * in.n + 16.0 * in.n)) / 4.0;
            if (in.d - 1 > dmax)
                fail("sample_complexity: d-1 must be at most (3n - sqrt(n^2+16n))/4");
            if (!(in.p > 0.0 && in.p < 1.0)) fail("sample_complexity: p must be in (0,1)");
            if (!(in.alpha_tsybakov > 0.0 && in.alpha_tsybakov < 0.125))
                fail("sample_complexity: alpha must be in (0, 1/8)");
            const double logn = std::log(double(in.n));
            out.k = in.alpha_tsybakov * double(in.d - 1) * (in.d - 1) /
                    (2.0 + 1.0 / (1.0 - in.p)) * logn;
            out.error_floor = std::sqrt(double(in.n)) / (1.0 + std::sqrt(double(in.n))) *
                              (1.0 - 2.0 * in.alpha_tsybakov -
                               std::sqrt(2.0 * in.alpha_tsybakov / logn));
            out.family_size = double(in.n);
            return out;
        }
        case Bound::hidden_static_sufficient: {
            if (in.n < 1 || in.d < 1 || in.s < 1) fail("sample_complexity: need n,d,s >= 1");
            if (!(in.p > 0.0 && in.p < 1.0)) fail("sample_complexity: p must be in (0,1)");
            if (!(in.p_min > 0.0 && in.p_min < 1.0))
                fail("sample_complexity: p_min must be in (0,1)");
            if (!(in.delta > 0.0 && in.delta < 1.0))
                fail("sample_complexity: delta must be in (0,1)");
            const double x = in.p * in.p * std::pow(1.0 - in.p, in.s) * in.p_min /
                             (double(in.d) * in.d);
            const double rate = -std::log1p(-x);
            out.k = ceil_k((std::log(double(in.n) * in.s) + std::log(1.0 / in.delta)) / rate);
            return out;
        }
        case Bound::hidden_minimax_threshold: {
            if (in.n < 1 || in.d < 1 || in.s < 1) fail("sample_complexity: need n,d,s >= 1");
            if (!(in.c1 > 0.0) || !(in.c2 >= 0.0) || !(2.0 * in.c1 + in.c2 < 1.0))
                fail("sample_complexity: need c1 > 0, c2 >= 0 and 2*c1 + c2 < 1");
            if (in.d > in.c1 * in.n || in.s - 1 > in.c2 * in.n)
                fail("sample_complexity: need d <= c1*n and s-1 <= c2*n");
            if (!(in.p > 0.0 && in.p < 1.0)) fail("sample_complexity: p must be in (0,1)");
            if (!(in.p_min > 0.0 && in.p_min < 1.0))
                fail("sample_complexity: p_min must be in (0,1)");
            if (!(in.alpha_tsybakov > 0.0 && in.alpha_tsybakov < 0.125))
                fail("sample_complexity: alpha must be in (0, 1/8)");
            const double M = 2.0 * in.c1 * (1.0 / (2.0 * in.c1 + in.c2) - 1.0) * in.n;
            if (!(M >= 2.0)) fail("sample_complexity: family size M must be >= 2");
            const double a = (1.0 - std::pow(1.0 - in.p, in.d)) / in.d;
            const double kl = -a * a * std::pow(1.0 - in.p, in.s - 1) * std::log1p(-in.p_min);
            out.k = std::log(M) / kl;
            out.error_floor = std::sqrt(M) / (1.0 + std::sqrt(M)) *
                              (1.0 - 2.0 * in.alpha_tsybakov -
                               std::sqrt(2.0 * in.alpha_tsybakov / std::log(M)));
            out.family_size = M;
            return out;
        }
        case Bound::robust_direct_sufficient:
        case Bound::robust_hidden_sufficient: {
            if (in.n < 2 || in.d < 1) fail("sample_complexity: need n >= 2 and d >= 1");
            if (!(in.p > 0.0 && in.p < 1.0)) fail("sample_complexity: p must be in (0,1)");
            if (!(in.c3 > 1.0)) fail("sample_complexity: c3 must exceed 1");
            if (!(in.q_low >= 0.0 && in.q_low < in.q_up && in.q_up <= 1.0))
                fail("sample_complexity: need 0 <= q_low < q_up <= 1");
            if (in.q_up < in.c3 * double(in.d) * in.d * in.q_low)
                fail("sample_complexity: need q_up >= c3*d^2*q_low");
            const double eps = in.p * in.p * in.q_up * (1.0 - 1.0 / in.c3) /
                               (2.0 * double(in.d) * in.d);
            out.epsilon = eps;
            if (which == Bound::robust_direct_sufficient) {
                if (!(in.delta > 0.0 && in.delta < 1.0))
                    fail("sample_complexity: delta must be in (0,1)");
                out.k = ceil_k((std::log(double(in.n)) + 0.5 * std::log(1.0 / in.delta)) /
                               (eps * eps));
                return out;
            }
            if (in.s < 1) fail("sample_complexity: s must be >= 1");
            if (!(in.p_min > 0.0 && in.p_min < 1.0))
                fail("sample_complexity: p_min must be in (0,1)");
            if (!(in.p_fade >= 0.0 && in.p_fade < in.p_min))
                fail("sample_complexity: need 0 <= p_fade < p_min");
            if (!(in.gamma > 0.0 && in.gamma < 1.0))
                fail("sample_complexity: gamma must be in (0,1)");
            const double ratio_delta = (in.p_min + in.p_fade) / 2.0;
            const double delta_w = (in.p_min - in.p_fade) * std::pow(1.0 - in.p, in.s) *
                                   std::pow(1.0 - in.q_low, in.d) * in.p * in.p /
                                   ((1.0 + ratio_delta) * double(in.d) * in.d);
            out.ratio_delta = ratio_delta;
            out.delta_w = delta_w;
            const double k1 = (std::log(double(in.n)) + 0.5 * std::log(2.0 / in.gamma)) /
                              (eps * eps);
            const double k2 = 2.0 / (delta_w * delta_w) *
                              ((in.s + 2.0) * std::log(double(in.n)) + std::log(4.0 / in.gamma));
            out.k = ceil_k(std::max(k1, k2));
            return out;
        }
    }
    fail("sample_complexity: unknown bound");
}

std::string bounds_table_csv(const BoundInputs& in) {
    auto fmt = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.12g", v);
        return std::string(buf);
    };
    auto row = [&](const char* name, Bound which) {
        std::string r = name;
        try {
            const auto v = sample_complexity(which, in);
            r += ",ok," + fmt(v.k);
            r += v.epsilon ? "," + fmt(*v.epsilon) : ",";
            r += v.ratio_delta ? "," + fmt(*v.ratio_delta) : ",";
            r += v.delta_w ? "," + fmt(*v.delta_w) : ",";
            r += v.error_floor ? "," + fmt(*v.error_floor) : ",";
            r += v.family_size ? "," + fmt(*v.family_size) : ",";
            r += ",\n";
        } catch (const std::exception& e) {
            r += std::string(",error,,,,,,\"") + e.what() + "\"\n";
        }
        return r;
    };
    std::string csv =
        "bound,status,k,epsilon,ratio_delta,delta_w,error_floor,family_size,error\n";
    csv += row("direct_static_sufficient", Bound::direct_static_sufficient);
    csv += row("direct_minimax_threshold", Bound::direct_minimax_threshold);
    csv += row("hidden_static_sufficient", Bound::hidden_static_sufficient);
    csv += row("hidden_minimax_threshold", Bound::hidden_minimax_threshold);
    csv += row("robust_direct_sufficient", Bound::robust_direct_sufficient);
    csv += row("robust_hidden_sufficient", Bound::robust_hidden_sufficient);
    return csv;
}

CliqueFamily gen_clique_family(int n, int d) {
    if (n < 5) fail("gen_clique_family: n must be >= 5");
    if (d < 2) fail("gen_clique_family: d must be >= 2");
    const double dmax = (3.0 * n - std::sqrt(double(n) * n + 16.0 * n)) / 4.0;
    if (d - 1 > dmax) fail("gen_clique_family: d-1 must be at most (3n - sqrt(n^2+16n))/4");

    const int size = d - 1;
    const int m0 = n / size;

    ModelParams params;
    params.d = d;
    params.s = 1;

    std::vector<NodePair> base_edges;
    std::vector<std::vector<int>> cliques;
    for (int start = 0; start < n; start += size) {
        std::vector<int> clique;
        const int end = std::min(n, start + size);
        for (int v = start; v < end; ++v) clique.push_back(v);
        for (std::size_t a = 0; a < clique.size(); ++a)
            for (std::size_t b = a + 1; b < clique.size(); ++b)
                base_edges.push_back({clique[a], clique[b]});
        cliques.push_back(std::move(clique));
    }
    CliqueFamily fam{InterferenceGraph::create(n, base_edges, {}, {}, {}, params),
                     {}, m0, size, std::move(cliques)};

    // Cross-clique candidate pairs among the first m0 cliques, in
    // lexicographic (i, j) order; the first n become the perturbations.
    std::vector<NodePair> cross;
    const int full_span = m0 * size;
    for (int i = 0; i < full_span && static_cast<int>(cross.size()) < n; ++i) {
        for (int j = i + 1; j < full_span; ++j) {
            if (i / size == j / size) continue;
            cross.push_back({i, j});
            if (static_cast<int>(cross.size()) == n) break;
        }
    }
    if (static_cast<int>(cross.size()) < n)
        fail("gen_clique_family: fewer than n cross-clique pairs available");

    for (const auto& e : cross) {
        auto edges = base_edges;
        edges.push_back(e);
        fam.perturbed.push_back(InterferenceGraph::create(n, edges, {}, {}, {}, params));
    }
    return fam;
}

GroupFamily gen_group_family(int n, int d, int s, double p_min, double c1, double c2) {
    if (n < 1 || d < 1 || s < 1) fail("gen_group_family: need n, d, s >= 1");
    if (!(p_min > 0.0 && p_min < 1.0)) fail("gen_group_family: p_min must be in (0,1)");
    if (!(c1 > 0.0) || !(c2 >= 0.0) || !(2.0 * c1 + c2 < 1.0))
        fail("gen_group_family: need c1 > 0, c2 >= 0 and 2*c1 + c2 < 1");
    if (d > c1 * n || s - 1 > c2 * n)
        fail("gen_group_family: need d <= c1*n and s-1 <= c2*n");

    const int group_size = 2 * d + s - 1;
    const int full_groups = n / group_size;
    const int M = static_cast<int>(std::floor(2.0 * c1 * (1.0 / (2.0 * c1 + c2) - 1.0) * n));
    if (M < 1) fail("gen_group_family: scaling constants give an empty family");
    if (M > 2 * d * full_groups)
        fail("gen_group_family: fewer cross-clique edges than the family size M");

    ModelParams params;
    params.d = d;  // clique members have d-1 neighbors each
    params.s = s;
    params.p_min = p_min;

    std::vector<NodePair> direct;
    std::vector<std::pair<Arc, double>> hidden;
    std::vector<Arc> cross_edges;  // removable, lexicographic

    for (int g = 0; g < full_groups; ++g) {
        const int base = g * group_size;
        std::vector<int> ca, cb, atoms;
        for (int v = 0; v < d; ++v) ca.push_back(base + v);
        for (int v = 0; v < d; ++v) cb.push_back(base + d + v);
        for (int v = 0; v < s - 1; ++v) atoms.push_back(base + 2 * d + v);
        auto add_clique = [&direct](const std::vector<int>& c) {
            for (std::size_t a = 0; a < c.size(); ++a)
                for (std::size_t b = a + 1; b < c.size(); ++b)
                    direct.push_back({c[a], c[b]});
        };
        add_clique(ca);
        add_clique(cb);
        for (int j : ca) {
            for (int atom : atoms) hidden.push_back({{atom, j}, p_min});
            hidden.push_back({{cb.front(), j}, p_min});
            cross_edges.push_back({cb.front(), j});
        }
        for (int j : cb) {
            for (int atom : atoms) hidden.push_back({{atom, j}, p_min});
            hidden.push_back({{ca.front(), j}, p_min});
            cross_edges.push_back({ca.front(), j});
        }
    }
    std::sort(cross_edges.begin(), cross_edges.end());

    GroupFamily fam{InterferenceGraph::create(n, direct, hidden, {}, {}, params, true),
                    {},
                    full_groups,
                    group_size,
                    M};

    for (int i = 0; i < M; ++i) {
        const Arc drop = cross_edges[i];
        std::vector<std::pair<Arc, double>> h;
        h.reserve(hidden.size() - 1);
        for (const auto& e : hidden)
            if (e.first != drop) h.push_back(e);
        fam.perturbed.push_back(InterferenceGraph::create(n, direct, h, {}, {}, params, true));
    }
    return fam;
}

}  // namespace confgraph
