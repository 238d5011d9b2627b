// Compares the OpenMP counting kernels against the serial reference
// implementations on representative workloads and reports speedups.

#include <chrono>
#include <cstdio>

#include "mdim/covercount.hpp"
#include "mdim/dynsys.hpp"

using namespace mdim;

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

void bench_separated() {
    DynSystem sys = make_circle_doubling();
    FiniteSample sample = sample_space(sys, 6000, 7);
    const int n = 6;
    const double eps = 0.01;

    auto t0 = std::chrono::steady_clock::now();
    auto serial = greedy_separated_serial(sample, sys, n, eps);
    double t_serial = ms_since(t0);

    t0 = std::chrono::steady_clock::now();
    auto parallel = greedy_separated(sample, sys, n, eps, ExecPolicy::Parallel);
    double t_parallel = ms_since(t0);

    bool match = serial.count == parallel.count && serial.witnesses == parallel.witnesses;
    std::printf("%-24s %10.1f %10.1f %8.2fx  results %s (count %lld)\n", "greedy_separated",
                t_serial, t_parallel, t_serial / t_parallel, match ? "match" : "DIFFER",
                serial.count);
}

void bench_cover() {
    const int n = 10;
    DynSystem sys = make_shift_system(base_binary(), 6, n, Sidedness::TwoSided,
                                      TailMode::FillExact);
    std::vector<std::pair<double, double>> atoms = {{0.0, 0.5}, {1.0, 0.5}};
    FiniteMeasure mu = make_cylinder_measure(sys, atoms, n);

    auto t0 = std::chrono::steady_clock::now();
    auto serial = greedy_measure_cover_serial(mu, sys, n, 0.4, 0.1, BallKind::bowen());
    double t_serial = ms_since(t0);

    t0 = std::chrono::steady_clock::now();
    auto parallel = greedy_measure_cover(mu, sys, n, 0.4, 0.1, BallKind::bowen());
    double t_parallel = ms_since(t0);

    bool match = serial.count == parallel.count && serial.centers == parallel.centers;
    std::printf("%-24s %10.1f %10.1f %8.2fx  results %s (count %lld)\n", "greedy_measure_cover",
                t_serial, t_parallel, t_serial / t_parallel, match ? "match" : "DIFFER",
                serial.count);
}

void bench_average_cover() {
    const int n = 9;
    DynSystem sys = make_shift_system(base_binary(), 8, n, Sidedness::TwoSided,
                                      TailMode::FillExact);
    std::vector<std::pair<double, double>> atoms = {{0.0, 0.5}, {1.0, 0.5}};
    FiniteMeasure mu = make_cylinder_measure(sys, atoms, n);

    auto t0 = std::chrono::steady_clock::now();
    auto serial = greedy_measure_cover_serial(mu, sys, n, 0.8, 0.5, BallKind::average());
    double t_serial = ms_since(t0);

    t0 = std::chrono::steady_clock::now();
    auto parallel = greedy_measure_cover(mu, sys, n, 0.8, 0.5, BallKind::average());
    double t_parallel = ms_since(t0);

    bool match = serial.count == parallel.count && serial.centers == parallel.centers;
    std::printf("%-24s %10.1f %10.1f %8.2fx  results %s (count %lld)\n", "average_cover",
                t_serial, t_parallel, t_serial / t_parallel, match ? "match" : "DIFFER",
                serial.count);
}

} // namespace

int main() {
    std::printf("%-24s %10s %10s %9s\n", "kernel", "serial ms", "omp ms", "speedup");
    bench_separated();
    bench_cover();
    bench_average_cover();
    return 0;
}
