// Benchmark of the data-parallel local phase: the same ring-driven run is
// timed serially and under OpenMP, and the traces are compared so the speedup
// never comes at the cost of determinism.

#include "pteem/mixture2d.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace pteem;
using namespace pteem::mix2d;

namespace {

Trace<Vec2> run_once(int threads, long long iters) {
    GaussianMixture2D model = benchmark_mixture();
    PopulationOptions opt;
    opt.temperatures = default_temperatures(Algorithm::pteem, false);
    opt.rings = default_energy_levels(false);
    opt.burnin = iters / 2;
    opt.kept = iters - iters / 2;
    opt.seed = 42;
    opt.threads = threads;
    std::vector<Vec2> init(static_cast<std::size_t>(opt.temperatures.size()), Vec2{0.5, 0.5});
    return run_pteem(model, RwKernel<GaussianMixture2D>{}, opt, std::move(init));
}

} // namespace

int main(int argc, char** argv) {
    const long long iters = argc > 1 ? std::atoll(argv[1]) : 50000;
    if (iters < 2) {
        std::fprintf(stderr, "usage: %s [iterations >= 2]\n", argv[0]);
        return 2;
    }
    int max_threads = 1;
#ifdef _OPENMP
    max_threads = omp_get_max_threads();
#else
    std::printf("built without OpenMP; only the serial reference path is available\n");
#endif

    std::vector<int> counts{1, 2, 4, 8, max_threads};
    std::sort(counts.begin(), counts.end());
    counts.erase(std::unique(counts.begin(), counts.end()), counts.end());
    counts.erase(std::remove_if(counts.begin(), counts.end(),
                                [max_threads](int t) { return t > max_threads; }),
                 counts.end());

    std::printf("local-phase benchmark: 20 chains, %lld iterations\n", iters);

    Trace<Vec2> reference;
    double t_serial = 0.0;
    for (int threads : counts) {
        const auto t0 = std::chrono::steady_clock::now();
        Trace<Vec2> trace = run_once(threads, iters);
        const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                               .count();
        const double rate = static_cast<double>(iters) * 20.0 / sec;

        bool identical = true;
        if (threads == counts.front()) {
            reference = trace;
            t_serial = sec;
        } else {
            identical = trace.samples == reference.samples &&
                        trace.rings_record == reference.rings_record;
        }
        std::printf("threads=%-2d  time=%8.3fs  local moves/s=%.3g  speedup=%.2fx  "
                    "trace identical to serial: %s\n",
                    threads, sec, rate, t_serial / sec, identical ? "yes" : "NO");
        if (!identical) return 1;
    }
    return 0;
}
