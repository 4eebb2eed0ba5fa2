#include "confgraph/direct.hpp"

#include <stdexcept>

namespace confgraph {

namespace {

std::vector<std::vector<double>> cooccurrence_impl(const SessionTrace& trace, bool parallel) {
    const int n = trace.n();
    const double k = static_cast<double>(trace.k());
    if (trace.k() == 0) throw std::invalid_argument("cooccurrence: empty trace");
    std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));

#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int i = 0; i < n; ++i) {
        m[i][i] = static_cast<double>(trace.x_col(i).count()) / k;
        for (int j = i + 1; j < n; ++j)
            m[i][j] = static_cast<double>(BitVec::and_count(trace.x_col(i), trace.x_col(j))) / k;
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) m[i][j] = m[j][i];
    return m;
}

}  // namespace

std::vector<std::vector<double>> cooccurrence(const SessionTrace& trace, bool parallel) {
    return cooccurrence_impl(trace, parallel);
}

std::vector<std::vector<double>> cooccurrence_serial(const SessionTrace& trace) {
    return cooccurrence_impl(trace, false);
}

std::vector<NodePair> estimate_direct_static(const SessionTrace& trace) {
    const int n = trace.n();
    std::vector<NodePair> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (!trace.x_col(i).intersects(trace.x_col(j))) edges.push_back({i, j});
    return edges;
}

std::vector<NodePair> estimate_direct_robust(const SessionTrace& trace, double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("estimate_direct_robust: epsilon must be in (0,1)");
    const int n = trace.n();
    const double k = static_cast<double>(trace.k());
    std::vector<NodePair> edges;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double freq =
                static_cast<double>(BitVec::and_count(trace.x_col(i), trace.x_col(j))) / k;
            if (freq < epsilon) edges.push_back({i, j});
        }
    }
    return edges;
}

}  // namespace confgraph
