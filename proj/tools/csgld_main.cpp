// Command-line front end for the contour-sampling library.
//
//   csgld run <config>      multi-seed sampling run, CSV artifacts per seed
//   csgld compare <config>  SGLD vs CSGLD vs KSGLD error-vs-step comparison
//   csgld oracle <config>   quadrature-only report (theta*, barriers, drift)
//   csgld flat-hist <dir>   flat-histogram diagnostic over a finished run
//
// Exit codes: 0 success, 1 usage/config/runtime error, 2 a chain diverged.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "csgld/errors.hpp"
#include "csgld/harness.hpp"

namespace {

struct overrides {
    std::int64_t seed = -1;          // --seed-override: run with this single seed
    std::int64_t steps = -1;         // --steps-override
    std::string output_dir;          // --output-dir
};

void add_override_flags(CLI::App* cmd, overrides& ov) {
    cmd->add_option("--seed-override", ov.seed,
                    "Replace the configured seed list with this single seed");
    cmd->add_option("--steps-override", ov.steps, "Replace the configured step count");
    cmd->add_option("--output-dir", ov.output_dir,
                    "Replace the configured output directory");
}

csgld::run_config load_with_overrides(const std::string& path, const overrides& ov) {
    csgld::run_config rc = csgld::load_run_config(csgld::config::parse_file(path));
    if (ov.seed >= 0) rc.seeds = {static_cast<std::uint64_t>(ov.seed)};
    if (ov.steps >= 0) rc.steps = ov.steps;
    if (!ov.output_dir.empty()) rc.output_dir = ov.output_dir;
    return rc;
}

void print_seed_line(const csgld::seed_summary& s) {
    std::cout << "seed " << s.seed << ": plain=" << csgld::format_double(s.plain_estimate)
              << " weighted=" << csgld::format_double(s.weighted_estimate)
              << " theta_l1=" << csgld::format_double(s.theta_l1)
              << " min_mult=" << csgld::format_double(s.min_multiplier);
    if (s.diverged) std::cout << " DIVERGED@" << s.divergence_step;
    std::cout << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Contour stochastic-gradient MCMC experiments"};
    app.require_subcommand(1);

    std::string run_cfg, compare_cfg, oracle_cfg, hist_dir;
    overrides run_ov, compare_ov, oracle_ov;
    bool serial = false;
    app.add_flag("--serial", serial, "Use the serial reference path (no OpenMP)");

    CLI::App* run_cmd = app.add_subcommand("run", "Multi-seed sampling run");
    run_cmd->add_option("config", run_cfg, "Run configuration file")->required();
    add_override_flags(run_cmd, run_ov);

    CLI::App* cmp_cmd =
        app.add_subcommand("compare", "SGLD vs CSGLD vs KSGLD error comparison");
    cmp_cmd->add_option("config", compare_cfg, "Run configuration file")->required();
    add_override_flags(cmp_cmd, compare_ov);

    CLI::App* orc_cmd = app.add_subcommand("oracle", "Quadrature-only oracle report");
    orc_cmd->add_option("config", oracle_cfg, "Run configuration file")->required();
    add_override_flags(orc_cmd, oracle_ov);

    CLI::App* fh_cmd =
        app.add_subcommand("flat-hist", "Flat-histogram diagnostic for a finished run");
    fh_cmd->add_option("run-dir", hist_dir, "Directory written by 'run'")->required();

    CLI11_PARSE(app, argc, argv);
    const csgld::exec_policy policy =
        serial ? csgld::exec_policy::serial : csgld::exec_policy::openmp;

    try {
        if (run_cmd->parsed()) {
            const csgld::run_config rc = load_with_overrides(run_cfg, run_ov);
            const csgld::run_summary sum = csgld::run(rc, policy);
            for (const auto& s : sum.seeds) print_seed_line(s);
            if (!rc.output_dir.empty())
                std::cout << "artifacts written to " << rc.output_dir << '\n';
            if (sum.any_diverged) {
                std::cerr << "error: at least one chain diverged\n";
                return 2;
            }
        } else if (cmp_cmd->parsed()) {
            const csgld::run_config rc = load_with_overrides(compare_cfg, compare_ov);
            const csgld::compare_summary sum = csgld::compare(rc, policy);
            std::cout << "final mean absolute error (" << rc.seeds.size() << " seeds, "
                      << rc.steps << " steps):\n";
            for (int m = 0; m < 3; ++m) {
                double acc = 0.0;
                for (double e : sum.final_abs_errors[m]) acc += e;
                std::cout << "  " << csgld::compare_summary::kMethods[m] << ": "
                          << csgld::format_double(
                                 acc / static_cast<double>(rc.seeds.size()))
                          << '\n';
            }
            if (!rc.output_dir.empty())
                std::cout << "artifacts written to " << rc.output_dir << '\n';
        } else if (orc_cmd->parsed()) {
            const csgld::run_config rc = load_with_overrides(oracle_cfg, oracle_ov);
            const csgld::oracle_summary sum = csgld::oracle_report(rc, policy);
            std::cout << "barrier original=" << csgld::format_double(sum.barrier_original)
                      << " flattened=" << csgld::format_double(sum.barrier_flattened)
                      << '\n';
            std::cout << "z(theta*)=" << csgld::format_double(sum.z_theta_star)
                      << " drift: max_s=" << csgld::format_double(sum.stability.max_s)
                      << " negative_fraction="
                      << csgld::format_double(sum.stability.fraction_negative) << '\n';
            if (!rc.output_dir.empty())
                std::cout << "artifacts written to " << rc.output_dir << '\n';
        } else if (fh_cmd->parsed()) {
            const csgld::flat_hist_summary sum =
                csgld::flat_histogram_from_dir(hist_dir, policy);
            std::cout << "covered regions:";
            for (int r : sum.covered) std::cout << ' ' << r;
            std::cout << "\nmax/min occupancy ratio = "
                      << csgld::format_double(sum.max_min_ratio) << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
