// Compares the serial reference dispatcher against the OpenMP dispatcher on a
// deliberately slow objective, first on a raw evaluation batch and then inside
// a full engine run, and checks that the parallel path reproduces the serial
// results exactly.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "optba/bees_engine.hpp"
#include "optba/trace_io.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace optba;
using clock_type = std::chrono::steady_clock;

namespace {

// default surrogate plus ~20k transcendental ops per call
struct SlowSurface final : Evaluator {
    SurrogateUnimodal surface{{49, 108}, kDefaultPeak, {2e-5, 1e-6}};
    double evaluate(const ParamVector& params, std::uint64_t eval_id) override {
        double sink = static_cast<double>(params[0]);
        for (int i = 0; i < 20000; ++i) {
            sink = std::sin(sink) + std::cos(sink * 0.5) + 1e-9;
        }
        volatile double keep = sink;
        (void)keep;
        return surface.evaluate(params, eval_id);
    }
};

double seconds_since(clock_type::time_point start) {
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

} // namespace

int main() {
    const int hw = static_cast<int>(std::thread::hardware_concurrency());
#ifdef _OPENMP
    std::printf("OpenMP enabled, %d hardware threads\n\n", hw);
#else
    std::printf("built without OpenMP: every dispatcher runs serially\n\n");
#endif

    const ParamSpace space({{"epochs", 1, 100, 1}, {"units", 16, 256, 1}});

    // raw batch: 2048 slow evaluations
    {
        std::vector<ParamVector> batch;
        Rng rng(1);
        for (int i = 0; i < 2048; ++i) batch.push_back(sample_uniform(space, rng));

        SlowSurface objective;
        SerialDispatcher serial;
        EvalContext serial_ctx(objective, serial);
        auto start = clock_type::now();
        const auto reference = serial_ctx.evaluate(batch);
        const double serial_time = seconds_since(start);
        std::printf("batch of %zu evaluations\n", batch.size());
        std::printf("  %-10s %8.3fs\n", "serial", serial_time);

        for (int workers : {2, 4, hw > 4 ? hw : 8}) {
            OmpDispatcher parallel(workers);
            EvalContext parallel_ctx(objective, parallel);
            start = clock_type::now();
            const auto result = parallel_ctx.evaluate(batch);
            const double elapsed = seconds_since(start);
            bool identical = result.size() == reference.size();
            for (std::size_t i = 0; identical && i < result.size(); ++i) {
                identical = result[i].fitness == reference[i].fitness &&
                            result[i].eval_id == reference[i].eval_id;
            }
            std::printf("  omp(%-2d)    %8.3fs  speedup %5.2fx  results %s\n", workers, elapsed,
                        serial_time / elapsed, identical ? "identical" : "DIFFER");
        }
    }

    // full runs: large recruit batches so the per-site kernels dominate
    {
        BAConfig config;
        config.n = 32;
        config.m = 8;
        config.e = 2;
        config.nep = 64;
        config.nsp = 16;
        config.seed = 7;
        config.stopping.max_iterations = 4;

        std::printf("\nengine run, n=%u nep=%u, %u iterations\n", config.n, config.nep,
                    config.stopping.max_iterations);
        SlowSurface serial_objective;
        SerialDispatcher serial;
        auto start = clock_type::now();
        const RunTrace reference = run(RunInputs{space, config, default_unimodal_spec(),
                                                 serial_objective, nullptr, serial, false});
        const double serial_time = seconds_since(start);
        std::printf("  %-10s %8.3fs  best=%s\n", "serial", serial_time,
                    format_double(reference.best.fitness).c_str());

        for (int workers : {2, 4, hw > 4 ? hw : 8}) {
            SlowSurface objective;
            OmpDispatcher parallel(workers);
            start = clock_type::now();
            const RunTrace trace = run(RunInputs{space, config, default_unimodal_spec(),
                                                 objective, nullptr, parallel, false});
            const double elapsed = seconds_since(start);
            const bool identical = trace_json_string(trace) == trace_json_string(reference);
            std::printf("  omp(%-2d)    %8.3fs  speedup %5.2fx  trace %s\n", workers, elapsed,
                        serial_time / elapsed, identical ? "identical" : "DIFFERS");
        }
    }
    return 0;
}
