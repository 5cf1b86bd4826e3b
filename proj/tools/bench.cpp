#include <chrono>
#include <cstdlib>
#include <iostream>

#include "d2c/simcheck.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

// Throughput of the differential harness, serial vs OpenMP case loop.

namespace {

double run_once(int count, bool parallel) {
    d2c::FuzzConfig cfg;
    cfg.count = count;
    cfg.seed = 2024;
    cfg.parallel = parallel;
    auto t0 = std::chrono::steady_clock::now();
    d2c::FuzzSummary sum = d2c::fuzz(cfg);
    auto t1 = std::chrono::steady_clock::now();
    if (sum.mismatches() != 0) {
        std::cerr << "unexpected mismatches during benchmark\n";
        std::exit(1);
    }
    double secs = std::chrono::duration<double>(t1 - t0).count();
    return count / secs;
}

}  // namespace

int main(int argc, char** argv) {
    int count = argc > 1 ? std::atoi(argv[1]) : 2000;
#ifdef _OPENMP
    int threads = omp_get_max_threads();
#else
    int threads = 1;
#endif
    run_once(count / 4, false);  // warm-up
    double serial = run_once(count, false);
    double parallel = run_once(count, true);
    std::cout << "cases:            " << count << "\n"
              << "threads:          " << threads << "\n"
              << "serial cases/s:   " << long(serial) << "\n"
              << "parallel cases/s: " << long(parallel) << "\n"
              << "speedup:          " << parallel / serial << "\n";
    return 0;
}
