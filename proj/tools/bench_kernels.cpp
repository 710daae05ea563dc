// Benchmark of the Monte Carlo kernels: OpenMP against the serial
// reference. Both paths draw from identical per-chunk streams, so the
// outputs must match exactly; the benchmark verifies that while timing.

#include <chrono>
#include <cstdio>
#include <functional>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ksrt/sim.hpp"

namespace {

using ksrt::sim::Parallelism;

double time_run(const std::function<double()>& fn, double& out) {
    const auto t0 = std::chrono::steady_clock::now();
    out = fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(const char* name, double serial_s, double parallel_s, double serial_v,
            double parallel_v) {
    std::printf("%-28s serial %8.3fs   parallel %8.3fs   speedup %.2fx   %s\n", name,
                serial_s, parallel_s, serial_s / parallel_s,
                serial_v == parallel_v ? "results identical" : "RESULTS DIFFER");
}

} // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; parallel path runs serially\n");
#endif

    {
        const ksrt::sim::DelayModel model{ksrt::sim::DelayKind::normal, 50e6, 10e6, 0.0};
        double vs = 0.0, vp = 0.0;
        const double ts = time_run(
            [&] { return ksrt::sim::monte_carlo_ber(model, 8000000, 42, Parallelism::serial); },
            vs);
        const double tp = time_run(
            [&] { return ksrt::sim::monte_carlo_ber(model, 8000000, 42, Parallelism::parallel); },
            vp);
        report("monte_carlo_ber 8e6", ts, tp, vs, vp);
    }

    {
        double vs = 0.0, vp = 0.0;
        const double ts = time_run(
            [&] {
                return ksrt::sim::eve_parity_error_mc(0.02, 81, 2000000, 42,
                                                      Parallelism::serial);
            },
            vs);
        const double tp = time_run(
            [&] {
                return ksrt::sim::eve_parity_error_mc(0.02, 81, 2000000, 42,
                                                      Parallelism::parallel);
            },
            vp);
        report("eve_parity_error 2e6x81", ts, tp, vs, vp);
    }

    {
        const auto topo = ksrt::sim::default_topology();
        double vs = 0.0, vp = 0.0;
        const double ts = time_run(
            [&] {
                const auto w =
                    ksrt::sim::simulate_rallies(topo, 2000000, 0.01, 42, Parallelism::serial);
                return static_cast<double>(w.initiator.back().rtt_ns);
            },
            vs);
        const double tp = time_run(
            [&] {
                const auto w = ksrt::sim::simulate_rallies(topo, 2000000, 0.01, 42,
                                                           Parallelism::parallel);
                return static_cast<double>(w.initiator.back().rtt_ns);
            },
            vp);
        report("simulate_rallies 2e6", ts, tp, vs, vp);
    }

    return 0;
}
