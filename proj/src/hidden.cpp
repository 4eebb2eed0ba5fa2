#include "confgraph/hidden.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace confgraph {

namespace {

void check_target(const SessionTrace& trace, int j, const char* what) {
    if (j < 0 || j >= trace.n())
        throw std::invalid_argument(std::string(what) + ": target node out of range");
}

// Crosses off, for every allowed node, which collection entries it hits.
struct HitIndex {
    std::vector<BitVec> hits;   // per allowed node position: mask over entries
    BitVec full;                // all entries
    std::size_t entries = 0;
};

HitIndex build_hit_index(const std::vector<BitVec>& sets, const std::vector<int>& allowed) {
    HitIndex idx;
    idx.entries = sets.size();
    idx.full = BitVec(sets.size());
    for (std::size_t t = 0; t < sets.size(); ++t) idx.full.set(t);
    idx.hits.assign(allowed.size(), BitVec(sets.size()));
    for (std::size_t a = 0; a < allowed.size(); ++a)
        for (std::size_t t = 0; t < sets.size(); ++t)
            if (sets[t].test(static_cast<std::size_t>(allowed[a]))) idx.hits[a].set(t);
    return idx;
}

bool is_hitting_set(const std::vector<BitVec>& sets, const std::vector<int>& chosen) {
    for (const auto& s : sets) {
        bool hit = false;
        for (int v : chosen)
            if (s.test(static_cast<std::size_t>(v))) {
                hit = true;
                break;
            }
        if (!hit) return false;
    }
    return true;
}

}  // namespace

CandidateCollection collect_candidates(const SessionTrace& trace, int j) {
    check_target(trace, j, "collect_candidates");
    CandidateCollection out;
    out.target = j;
    const auto nack_ts = trace.nack_col(j).to_indices();
    for (const int ti : nack_ts) {
        const std::uint64_t t = static_cast<std::uint64_t>(ti);
        BitVec s(trace.n());
        for (int i = 0; i < trace.n(); ++i)
            if (i != j && trace.x(t, i)) s.set(i);
        out.nack_sessions.push_back(t);
        out.sets.push_back(std::move(s));
    }
    return out;
}

std::optional<std::vector<int>> min_hitting_set(const std::vector<BitVec>& sets,
                                                const std::vector<int>& allowed, int max_size) {
    if (max_size < 0) throw std::invalid_argument("min_hitting_set: negative size cap");
    if (sets.empty()) return std::vector<int>{};

    // Multiplicity is irrelevant; search over distinct sets only.
    std::vector<BitVec> uniq = sets;
    std::sort(uniq.begin(), uniq.end(), [](const BitVec& a, const BitVec& b) {
        return std::lexicographical_compare(a.words(), a.words() + a.word_count(), b.words(),
                                            b.words() + b.word_count());
    });
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());

    std::vector<int> sorted_allowed = allowed;
    std::sort(sorted_allowed.begin(), sorted_allowed.end());
    const HitIndex idx = build_hit_index(uniq, sorted_allowed);
    const int na = static_cast<int>(sorted_allowed.size());

    std::vector<int> pick;
    // Size-incremental search; within a size, combinations are generated
    // in ascending lexicographic order so the first hit is the canonical
    // minimizer.
    for (int size = 1; size <= max_size; ++size) {
        if (size > na) break;
        std::vector<int> comb(size);
        for (int c = 0; c < size; ++c) comb[c] = c;
        while (true) {
            BitVec covered(idx.entries);
            for (int c : comb) covered |= idx.hits[static_cast<std::size_t>(c)];
            if (covered == idx.full) {
                pick.clear();
                for (int c : comb) pick.push_back(sorted_allowed[static_cast<std::size_t>(c)]);
                if (!is_hitting_set(sets, pick))
                    throw std::logic_error("min_hitting_set: verification failed");
                return pick;
            }
            int pos = size - 1;
            while (pos >= 0 && comb[pos] == na - size + pos) --pos;
            if (pos < 0) break;
            ++comb[pos];
            for (int c = pos + 1; c < size; ++c) comb[c] = comb[c - 1] + 1;
        }
    }
    return std::nullopt;
}

EstimationResult estimate_hidden_static(const SessionTrace& trace,
                                        const std::vector<NodePair>& direct_estimate, int s_cap,
                                        bool restrict_to_nonadjacent) {
    if (s_cap < 0) throw std::invalid_argument("estimate_hidden_static: negative size cap");
    const int n = trace.n();
    std::vector<BitVec> adj(n, BitVec(n));
    for (const auto& [i, j] : direct_estimate) {
        adj[i].set(j);
        adj[j].set(i);
    }

    EstimationResult result;
    result.n = n;
    for (int j = 0; j < n; ++j) {
        const auto collection = collect_candidates(trace, j);
        if (collection.sets.empty()) continue;
        std::vector<int> allowed;
        for (int i = 0; i < n; ++i) {
            if (i == j) continue;
            if (restrict_to_nonadjacent && adj[j].test(i)) continue;
            allowed.push_back(i);
        }
        const auto mhs = min_hitting_set(collection.sets, allowed, s_cap);
        if (!mhs) {
            result.flags.push_back({j, "no hitting set within size cap"});
            continue;
        }
        for (int i : *mhs) result.hidden.push_back({{i, j}, 1.0});
    }
    std::sort(result.hidden.begin(), result.hidden.end());
    return result;
}

EstimationResult estimate_hidden_s1(const SessionTrace& trace) {
    const int n = trace.n();
    EstimationResult result;
    result.n = n;
    for (int j = 0; j < n; ++j) {
        const std::size_t failures = trace.nack_col(j).count();
        if (failures == 0) continue;
        int winner = -1;
        int full_count = 0;
        for (int i = 0; i < n; ++i) {
            if (i == j) continue;
            if (BitVec::and_count(trace.x_col(i), trace.nack_col(j)) == failures) {
                ++full_count;
                if (winner < 0) winner = i;
            }
        }
        if (winner < 0) {
            result.flags.push_back({j, "no node active in every failed session"});
            continue;
        }
        if (full_count > 1)
            result.flags.push_back({j, "ambiguous single interferer, lowest index kept"});
        result.hidden.push_back({{winner, j}, 1.0});
    }
    std::sort(result.hidden.begin(), result.hidden.end());
    return result;
}

namespace {

// Shared by p_hat and the robust estimator: minimum, over screening
// sets S of size <= s_cap from `pool`, of the failure ratio on the
// sessions selected by `base`.
std::optional<double> min_ratio_over_subsets(const SessionTrace& trace, const BitVec& base,
                                             const BitVec& nack_j, const std::vector<int>& pool,
                                             int s_cap) {
    double best = std::numeric_limits<double>::infinity();
    bool defined = false;

    auto consider = [&](const BitVec& mask) {
        const std::size_t den = mask.count();
        if (den == 0) return;
        const std::size_t num = BitVec::and_count(mask, nack_j);
        const double ratio = static_cast<double>(num) / static_cast<double>(den);
        if (!defined || ratio < best) {
            best = ratio;
            defined = true;
        }
    };

    consider(base);
    if (s_cap >= 1) {
        // Depth-first over index combinations; each level silences one
        // more pool node.
        auto recurse = [&](auto&& self, std::size_t from, const BitVec& mask, int depth) -> void {
            if (depth == s_cap) return;
            for (std::size_t a = from; a < pool.size(); ++a) {
                BitVec next = mask;
                next.and_not(trace.x_col(pool[a]));
                consider(next);
                self(self, a + 1, next, depth + 1);
            }
        };
        recurse(recurse, 0, base, 0);
    }
    if (!defined) return std::nullopt;
    return best;
}

}  // namespace

std::optional<double> p_hat(const SessionTrace& trace, int i, int j, const BitVec& neighbors_j,
                            int s_cap) {
    check_target(trace, j, "p_hat");
    check_target(trace, i, "p_hat");
    if (i == j) throw std::invalid_argument("p_hat: i and j must differ");
    if (neighbors_j.size() != static_cast<std::size_t>(trace.n()))
        throw std::invalid_argument("p_hat: neighbor mask size mismatch");
    if (neighbors_j.test(static_cast<std::size_t>(i)))
        throw std::invalid_argument("p_hat: i must not neighbor j");
    if (s_cap < 0) throw std::invalid_argument("p_hat: negative size cap");

    BitVec neighbor_active(trace.k());
    for (int v : neighbors_j.to_indices()) neighbor_active |= trace.x_col(v);

    BitVec base = trace.x_col(i);
    base &= trace.x_col(j);
    base.and_not(neighbor_active);

    std::vector<int> pool;
    for (int v = 0; v < trace.n(); ++v)
        if (v != i && v != j && !neighbors_j.test(static_cast<std::size_t>(v))) pool.push_back(v);

    return min_ratio_over_subsets(trace, base, trace.nack_col(j), pool, s_cap);
}

EstimationResult estimate_hidden_robust(const SessionTrace& trace,
                                        const std::vector<NodePair>& direct_estimate,
                                        const ModelParams& params, bool parallel) {
    params.validate();
    const int n = trace.n();
    const double threshold = (params.p_min + params.p_fade) / 2.0;

    std::vector<BitVec> adj(n, BitVec(n));
    for (const auto& [i, j] : direct_estimate) {
        adj[i].set(j);
        adj[j].set(i);
    }

    EstimationResult result;
    result.n = n;
    result.pair_stat.assign(n, std::vector<double>(n, std::numeric_limits<double>::quiet_NaN()));
    std::vector<std::vector<EstimationFlag>> flags(n);

#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int j = 0; j < n; ++j) {
        BitVec neighbor_active(trace.k());
        for (int v : adj[j].to_indices()) neighbor_active |= trace.x_col(v);
        BitVec base_j = trace.x_col(j);
        base_j.and_not(neighbor_active);

        for (int i = 0; i < n; ++i) {
            if (i == j || adj[j].test(i)) continue;
            BitVec base = base_j;
            base &= trace.x_col(i);
            std::vector<int> pool;
            for (int v = 0; v < n; ++v)
                if (v != i && v != j && !adj[j].test(v)) pool.push_back(v);
            const auto ratio =
                min_ratio_over_subsets(trace, base, trace.nack_col(j), pool, params.s);
            if (!ratio) {
                flags[j].push_back({j, "insufficient data for pair " + std::to_string(i) + "->" +
                                           std::to_string(j)});
                continue;
            }
            result.pair_stat[i][j] = *ratio;
        }
    }

    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const double v = result.pair_stat[i][j];
            if (!std::isnan(v) && v >= threshold) result.hidden.push_back({{i, j}, v});
        }
        for (auto& f : flags[j]) result.flags.push_back(std::move(f));
    }
    std::sort(result.hidden.begin(), result.hidden.end());
    return result;
}

}  // namespace confgraph
