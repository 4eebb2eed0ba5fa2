// Times the OpenMP kernels against their serial references.

#include <chrono>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "confgraph/direct.hpp"
#include "confgraph/hidden.hpp"
#include "confgraph/sim.hpp"
#include "confgraph/theory.hpp"

using namespace confgraph;
using clock_type = std::chrono::steady_clock;

namespace {

template <typename F>
double ms(F&& f) {
    const auto t0 = clock_type::now();
    f();
    const auto t1 = clock_type::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

void report(const char* name, double serial_ms, double parallel_ms) {
    std::printf("%-28s serial %9.1f ms   parallel %9.1f ms   speedup %.2fx\n", name, serial_ms,
                parallel_ms, serial_ms / parallel_ms);
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (OpenMP disabled)\n");
#endif

    const auto fam = gen_clique_family(40, 6);
    ModelParams params;
    params.p = 0.5;
    params.d = 6;
    params.p_min = 0.5;
    const std::uint64_t k = 200000;

    sample_trace(fam.base, params, 20000, 7);  // warm-up

    SessionTrace trace(1, 1);
    const double samp_s = ms([&] { trace = sample_trace_serial(fam.base, params, k, 7); });
    SessionTrace trace_p(1, 1);
    const double samp_p = ms([&] { trace_p = sample_trace(fam.base, params, k, 7, {}, true); });
    report("sample_trace", samp_s, samp_p);
    if (!(trace == trace_p)) {
        std::printf("FATAL: parallel sampler diverged from the serial reference\n");
        return 1;
    }

    std::vector<std::vector<double>> m1, m2;
    cooccurrence(trace, true);  // warm-up
    const double co_s = ms([&] { m1 = cooccurrence_serial(trace); });
    const double co_p = ms([&] { m2 = cooccurrence(trace, true); });
    report("cooccurrence", co_s, co_p);
    if (m1 != m2) {
        std::printf("FATAL: parallel co-occurrence diverged\n");
        return 1;
    }

    // robust hidden scan on a fade-prone instance
    ModelParams rparams;
    rparams.p = 0.5;
    rparams.d = 3;
    rparams.s = 1;
    rparams.p_min = 0.6;
    rparams.p_fade = 0.1;
    rparams.channel = ChannelMode::random_channel;
    std::vector<std::pair<Arc, double>> hidden;
    for (int j = 0; j < 6; ++j) hidden.push_back({{(j + 7) % 16, j}, 0.7});
    const auto rg = InterferenceGraph::create(16, {{8, 9}, {10, 11}}, hidden,
                                               std::vector<double>(16, 0.05), {}, rparams);
    const auto rtrace = sample_trace(rg, rparams, 100000, 9);
    const auto d_est = estimate_direct_robust(rtrace, 0.01);
    EstimationResult r1, r2;
    estimate_hidden_robust(rtrace, d_est, rparams, false);  // warm-up
    const double hid_s =
        ms([&] { r1 = estimate_hidden_robust(rtrace, d_est, rparams, false); });
    const double hid_p =
        ms([&] { r2 = estimate_hidden_robust(rtrace, d_est, rparams, true); });
    report("estimate_hidden_robust", hid_s, hid_p);
    if (r1.hidden != r2.hidden) {
        std::printf("FATAL: parallel robust estimator diverged\n");
        return 1;
    }
    return 0;
}
