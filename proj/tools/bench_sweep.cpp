// Benchmark of the OpenMP sweep kernel against the serial reference.
// Both paths must agree exactly; the table reports wall time and speedup.

#include "nitool/classification.hpp"

#include <chrono>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace nitool;
using clock_type = std::chrono::steady_clock;

namespace {

double time_best_of(int reps, const StateSpaceSystem& sys, const SweepConfig& cfg, bool parallel,
                    std::vector<FrequencySample>& out) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = clock_type::now();
        out = parallel ? sweep_frequency_response(sys, cfg)
                       : sweep_frequency_response_serial(sys, cfg);
        const auto t1 = clock_type::now();
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
}

}  // namespace

int main() {
    const GeneratedNi gen = generate_ni(/*order=*/12, /*io_dim=*/3, /*seed=*/2024, /*strict=*/false);

    SweepConfig cfg;
    cfg.points = 30000;

#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (built without OpenMP)\n");
#endif
    std::printf("system: order %ld, io %ld; grid: %d points\n",
                static_cast<long>(gen.system.order()), static_cast<long>(gen.system.inputs()),
                cfg.points);

    std::vector<FrequencySample> serial, parallel;
    const double t_serial   = time_best_of(3, gen.system, cfg, false, serial);
    const double t_parallel = time_best_of(3, gen.system, cfg, true, parallel);

    double max_dev = 0.0;
    for (std::size_t i = 0; i < serial.size(); ++i) {
        max_dev = std::max(max_dev,
                           (serial[i].value - parallel[i].value).cwiseAbs().maxCoeff());
        max_dev = std::max(
            max_dev,
            (serial[i].imag_part_spectrum - parallel[i].imag_part_spectrum).cwiseAbs().maxCoeff());
    }

    std::printf("%-10s %10.4f s\n", "serial", t_serial);
    std::printf("%-10s %10.4f s\n", "openmp", t_parallel);
    std::printf("speedup    %10.2fx\n", t_serial / t_parallel);
    std::printf("max |serial - openmp| = %.3e\n", max_dev);
    return max_dev == 0.0 ? 0 : 1;
}
