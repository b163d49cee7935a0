// Benchmark of the serial reference path against the OpenMP path for the two
// parallel kernels: quadrature region masses and multi-seed chain sweeps.
// Also checks that both policies produce bit-identical results.

#include <chrono>
#include <cstdio>
#include <functional>
#include <vector>

#include "csgld/harness.hpp"
#include "csgld/oracle.hpp"

using namespace csgld;

namespace {

double seconds_of(const std::function<void()>& fn, int reps) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count() / reps;
}

void report(const char* name, double serial_s, double openmp_s, bool identical) {
    std::printf("%-24s serial %8.4fs  openmp %8.4fs  speedup %5.2fx  identical %s\n",
                name, serial_s, openmp_s, serial_s / openmp_s, identical ? "yes" : "NO");
}

}  // namespace

int main() {
    target_spec ts;
    ts.kind = target_kind::gaussian_mixture;
    ts.gradient_noise_sigma = 0.1;
    const auto t = make_target(ts);

    energy_partition p;
    p.m = 50;
    p.u1 = 3.0;
    p.delta_u = 1.0;

    quadrature_grid grid;

    std::vector<double> serial_mass, openmp_mass;
    const double quad_serial = seconds_of(
        [&] { serial_mass = region_masses(*t, p, grid, nullptr, 0.0,
                                          exec_policy::serial).mass; }, 3);
    const double quad_openmp = seconds_of(
        [&] { openmp_mass = region_masses(*t, p, grid, nullptr, 0.0,
                                          exec_policy::openmp).mass; }, 3);
    report("region_masses(1e6)", quad_serial, quad_openmp, serial_mass == openmp_mass);

    run_config rc;
    rc.target = ts;
    rc.partition = p;
    rc.kernel.kind = kernel_kind::csgld;
    rc.steps = 50000;
    rc.seeds = {11, 12, 13, 14};
    rc.x0 = {4.0};

    run_summary serial_run, openmp_run;
    const double run_serial =
        seconds_of([&] { serial_run = run(rc, exec_policy::serial); }, 1);
    const double run_openmp =
        seconds_of([&] { openmp_run = run(rc, exec_policy::openmp); }, 1);
    bool same = serial_run.final_thetas == openmp_run.final_thetas;
    for (std::size_t s = 0; s < rc.seeds.size() && same; ++s)
        same = serial_run.seeds[s].weighted_estimate ==
               openmp_run.seeds[s].weighted_estimate;
    report("run(4 seeds x 5e4)", run_serial, run_openmp, same);
    return 0;
}
