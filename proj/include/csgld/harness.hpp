#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "csgld/config.hpp"
#include "csgld/dynamics.hpp"
#include "csgld/oracle.hpp"
#include "csgld/parallel.hpp"
#include "csgld/partition.hpp"
#include "csgld/target.hpp"
#include "csgld/theta.hpp"

namespace csgld {

// Fully resolved experiment description: target, energy partition, sampling
// kernel, step-size schedule, run controls, and oracle/diagnostic settings.
// Built from a flat key=value config by load_run_config and echoed back in a
// re-parseable form by write_config_echo.
struct run_config {
    target_spec target;
    energy_partition partition;
    kernel_config kernel;
    step_schedule schedule;
    double rho = 0.0;  // regularized theta update when > 0

    long steps = 1000;
    long thinning = 1;
    long theta_stride = 0;  // 0 resolves to max(1, steps / 1000)
    double burn_in_fraction = 0.1;
    std::vector<std::uint64_t> seeds{1};
    std::vector<double> x0;  // empty resolves to zeros
    double crossing_threshold = std::numeric_limits<double>::quiet_NaN();
    std::string output_dir;  // empty: no files are written

    quadrature_grid grid;
    int oracle_trials = 100;
    double oracle_mode_a = -6.0;
    double oracle_mode_b = 4.0;
    double reference_mean = 0.0;  // true estimand value used by compare()
    double mass_floor = 1e-3;     // flat-histogram coverage threshold
};

// Parses and validates a run_config; consumes every key it understands and
// then rejects unknown keys (with the offending line). Throws invalid_input /
// config_error on bad values.
run_config load_run_config(const config& cfg);

// Writes the resolved configuration as canonical key=value lines that
// load_run_config parses back to an identical run_config.
void write_config_echo(const run_config& rc, std::ostream& os);

long resolved_theta_stride(const run_config& rc);
long resolved_estimator_start(const run_config& rc);

// Per-seed outcome of run(). theta errors are NaN when no quadrature oracle
// is available for the target.
struct seed_summary {
    std::uint64_t seed = 0;
    bool diverged = false;
    long divergence_step = -1;
    double plain_estimate = std::numeric_limits<double>::quiet_NaN();
    double weighted_estimate = std::numeric_limits<double>::quiet_NaN();
    double theta_l1 = std::numeric_limits<double>::quiet_NaN();
    double theta_l1_core = std::numeric_limits<double>::quiet_NaN();
    double min_multiplier = 1.0;
    long negative_multiplier_steps = 0;
    long first_negative_multiplier_step = -1;
    long first_crossing_step = -1;
    long clamp_events = 0;
};

struct run_summary {
    std::vector<seed_summary> seeds;
    std::vector<std::vector<long>> visit_counts;    // per seed, post burn-in
    std::vector<long> pooled_counts;                // summed over seeds
    std::vector<std::vector<double>> final_thetas;  // per seed
    std::vector<double> theta_star;    // empty when no oracle is available
    std::vector<int> core_regions;     // smallest oracle-mass set >= 99%
    bool any_diverged = false;
};

// Runs one chain per seed (seeds run independently; OpenMP under the openmp
// policy). When rc.output_dir is set, writes per-seed trajectory.csv and
// theta_trace.csv plus run-level summary.csv, histogram.csv and
// config_echo.cfg. Divergence is reported in the summary, never thrown.
run_summary run(const run_config& rc, exec_policy policy = exec_policy::openmp);

// Error-vs-step comparison of SGLD, CSGLD and KSGLD derived from one config:
// all three share the target, partition, seeds, step budget and kernel scale
// parameters; SGLD drops the multiplier and theta machinery, KSGLD runs with
// theta pinned to the oracle theta*. Estimates are dynamic importance
// weighted for CSGLD/KSGLD and plain averages for SGLD, each over the
// post-burn-in window of the checkpoint (burn_in_fraction of the checkpoint).
struct compare_summary {
    static constexpr std::array<const char*, 3> kMethods{"sgld", "csgld", "ksgld"};

    std::vector<long> checkpoints;                       // log-spaced, ends at steps
    std::array<std::vector<double>, 3> mean_abs_error;   // [method][checkpoint]
    std::array<std::vector<double>, 3> final_estimates;  // [method][seed]
    std::array<std::vector<double>, 3> final_abs_errors; // [method][seed]
    std::vector<double> theta_star;
};
compare_summary compare(const run_config& rc, exec_policy policy = exec_policy::openmp);

// Flat-histogram diagnostic: restrict the pooled post-burn-in visit counts to
// the regions the oracle says carry at least mass_floor probability, then
// report max/min occupancy. A perfectly flat histogram has ratio 1; a run
// that never reached a covered region reports +inf.
struct flat_hist_summary {
    std::vector<long> counts;         // pooled, size m
    std::vector<double> theta_star;   // size m
    std::vector<int> covered;         // 1-based region ids with mass >= floor
    double max_min_ratio = std::numeric_limits<double>::infinity();
    double mass_floor = 0.0;
};
flat_hist_summary flat_histogram_report(const std::vector<long>& pooled_counts,
                                        const std::vector<double>& theta_star,
                                        double mass_floor);

// Reads <run_dir>/config_echo.cfg and <run_dir>/histogram.csv from a previous
// run, recomputes theta*, and writes <run_dir>/flat_hist.csv.
flat_hist_summary flat_histogram_from_dir(const std::string& run_dir,
                                          exec_policy policy = exec_policy::openmp);

// Quadrature-only report: theta*, flattened density at the config's zeta,
// energy barriers of the original and flattened curves between the two
// configured modes, the mean-field drift certificate, and the normalizer
// Z = sum_i theta*(i)^(1 - zeta). Writes theta_star.csv, flattened.csv,
// stability.csv and barrier.csv when rc.output_dir is set.
struct oracle_summary {
    std::vector<double> theta_star;
    flattened_curves curves;
    double barrier_original = 0.0;
    double barrier_flattened = 0.0;
    double z_theta_star = 0.0;
    stability_report stability;
};
oracle_summary oracle_report(const run_config& rc, exec_policy policy = exec_policy::openmp);

// Shortest round-trip decimal rendering used by every CSV writer ("nan",
// "inf", "-inf" for non-finite values).
std::string format_double(double v);

}  // namespace csgld
