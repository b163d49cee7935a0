#include "csgld/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "csgld/errors.hpp"

namespace csgld {

namespace fs = std::filesystem;

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::string format_u64_hex(std::uint64_t v) {
    char buf[17] = "0000000000000000";
    char tmp[17];
    auto r = std::to_chars(tmp, tmp + sizeof(tmp), v, 16);
    const long n = r.ptr - tmp;
    std::copy(tmp, tmp + n, buf + (16 - n));
    return std::string(buf, 16);
}

const char* kind_name(target_kind k) {
    return k == target_kind::gaussian_mixture ? "gaussian-mixture" : "subsampled-regression";
}

const char* kind_name(kernel_kind k) {
    switch (k) {
        case kernel_kind::sgld: return "sgld";
        case kernel_kind::csgld: return "csgld";
        case kernel_kind::ksgld: return "ksgld";
        case kernel_kind::sghmc: return "sghmc";
        case kernel_kind::csghmc: return "csghmc";
    }
    return "csgld";
}

target_kind parse_target_kind(const std::string& s) {
    if (s == "gaussian-mixture") return target_kind::gaussian_mixture;
    if (s == "subsampled-regression") return target_kind::subsampled_regression;
    throw invalid_input("unknown target.kind '" + s + "'");
}

kernel_kind parse_kernel_kind(const std::string& s) {
    if (s == "sgld") return kernel_kind::sgld;
    if (s == "csgld") return kernel_kind::csgld;
    if (s == "ksgld") return kernel_kind::ksgld;
    if (s == "sghmc") return kernel_kind::sghmc;
    if (s == "csghmc") return kernel_kind::csghmc;
    throw invalid_input("unknown kernel.kind '" + s + "'");
}

std::ofstream open_csv(const fs::path& path) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw invalid_input("cannot open '" + path.string() + "' for writing");
    return os;
}

// Smallest set of regions whose oracle mass reaches 99%, as 1-based ids in
// ascending order.
std::vector<int> core_mass_regions(const std::vector<double>& theta_star) {
    std::vector<int> order(theta_star.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return theta_star[a] > theta_star[b]; });
    std::vector<int> core;
    double mass = 0.0;
    for (int idx : order) {
        core.push_back(idx + 1);
        mass += theta_star[idx];
        if (mass >= 0.99) break;
    }
    std::sort(core.begin(), core.end());
    return core;
}

double l1_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s;
}

double l1_distance_on(const std::vector<double>& a, const std::vector<double>& b,
                      const std::vector<int>& regions) {
    double s = 0.0;
    for (int r : regions) s += std::abs(a[r - 1] - b[r - 1]);
    return s;
}

bool oracle_available(const target& t, const quadrature_grid& grid) {
    return t.dimension() == 1 &&
           t.tail_mass_bound(grid.lo, grid.hi) <= quadrature_grid::kTailTolerance;
}

chain_options make_chain_options(const run_config& rc) {
    chain_options opts;
    opts.steps = rc.steps;
    opts.thinning = rc.thinning;
    opts.estimator_start = resolved_estimator_start(rc);
    opts.schedule = rc.schedule;
    opts.rho = rc.rho;
    opts.crossing_threshold = rc.crossing_threshold;
    opts.theta_stride = resolved_theta_stride(rc);
    return opts;
}

std::vector<double> initial_point(const run_config& rc) {
    if (!rc.x0.empty()) return rc.x0;
    return std::vector<double>(static_cast<std::size_t>(rc.target.dimension), 0.0);
}

void write_trajectory_header(std::ostream& os) {
    os << "step,x,x_norm,energy_scaled,region,multiplier,theta_region,theta_hash,"
          "importance_weight,weighted_estimate\n";
}

void write_trajectory_row(std::ostream& os, const chain_record& rec) {
    os << rec.step << ',' << format_double(rec.x_first) << ','
       << format_double(rec.x_norm) << ',' << format_double(rec.energy_scaled) << ','
       << rec.j_tilde << ',' << format_double(rec.multiplier) << ','
       << format_double(rec.theta_j) << ',' << format_u64_hex(rec.theta_snapshot) << ','
       << format_double(rec.importance_weight) << ','
       << format_double(rec.weighted_estimate) << '\n';
}

}  // namespace

long resolved_theta_stride(const run_config& rc) {
    if (rc.theta_stride > 0) return rc.theta_stride;
    return std::max<long>(1, rc.steps / 1000);
}

long resolved_estimator_start(const run_config& rc) {
    return static_cast<long>(std::floor(rc.burn_in_fraction * static_cast<double>(rc.steps)));
}

run_config load_run_config(const config& cfg) {
    run_config rc;

    rc.target.kind = parse_target_kind(cfg.get_string("target.kind", "gaussian-mixture"));
    rc.target.dimension = static_cast<int>(cfg.get_long("target.dimension", 1));
    rc.target.temperature = cfg.get_double("target.temperature", 1.0);
    rc.target.dataset_size = cfg.get_long("target.dataset-size", 1);
    rc.target.batch_size = cfg.get_long("target.batch-size", 1);
    rc.target.gradient_noise_sigma = cfg.get_double("target.gradient-noise-sigma", 0.0);
    rc.target.data_seed =
        static_cast<std::uint64_t>(cfg.get_long("target.data-seed", 20200907));

    rc.partition.m = static_cast<int>(cfg.get_long("partition.m", 50));
    rc.partition.u1 = cfg.get_double("partition.u1", 0.0);
    rc.partition.delta_u = cfg.get_double("partition.delta-u", 1.0);

    rc.kernel.kind = parse_kernel_kind(cfg.get_string("kernel.kind", "csgld"));
    rc.kernel.epsilon = cfg.get_double("kernel.epsilon", 0.1);
    rc.kernel.zeta = cfg.get_double("kernel.zeta", 0.75);
    rc.kernel.momentum = cfg.get_double("kernel.momentum", 0.9);
    rc.kernel.tau = cfg.get_double("kernel.tau", 1.0);
    rc.kernel.epsilon_decay = cfg.get_double("kernel.epsilon-decay", 1.0);
    rc.kernel.decay_every = cfg.get_long("kernel.decay-every", 0);

    rc.schedule.A = cfg.get_double("schedule.a", 1.0);
    rc.schedule.alpha = cfg.get_double("schedule.alpha", 0.6);
    rc.schedule.B = cfg.get_double("schedule.b", 100.0);
    rc.rho = cfg.get_double("theta.rho", 0.0);

    rc.steps = cfg.get_long("run.steps", 1000);
    rc.thinning = cfg.get_long("run.thinning", 1);
    rc.theta_stride = cfg.get_long("run.theta-stride", 0);
    rc.burn_in_fraction = cfg.get_double("run.burn-in-fraction", 0.1);
    rc.seeds = cfg.get_u64_list("run.seeds", {1});
    rc.x0 = cfg.get_double_list("run.x0", {});
    rc.crossing_threshold = cfg.get_double("run.crossing-threshold",
                                           std::numeric_limits<double>::quiet_NaN());
    rc.output_dir = cfg.get_string("run.output-dir", "");
    const std::string rng_id = cfg.get_string("run.rng", kRngId);
    if (rng_id != kRngId)
        throw invalid_input("run.rng must be '" + std::string(kRngId) + "'");

    rc.grid.lo = cfg.get_double("oracle.grid-lo", rc.grid.lo);
    rc.grid.hi = cfg.get_double("oracle.grid-hi", rc.grid.hi);
    rc.grid.points = cfg.get_long("oracle.grid-points", rc.grid.points);
    rc.oracle_trials = static_cast<int>(cfg.get_long("oracle.trials", 100));
    rc.oracle_mode_a = cfg.get_double("oracle.mode-a", -6.0);
    rc.oracle_mode_b = cfg.get_double("oracle.mode-b", 4.0);
    rc.reference_mean = cfg.get_double("compare.reference-mean", 0.0);
    rc.mass_floor = cfg.get_double("flat-hist.mass-floor", 1e-3);

    cfg.reject_unknown_keys();

    validate(rc.partition);
    validate(rc.kernel);
    validate(rc.schedule);
    if (rc.steps < 0) throw invalid_input("run.steps must be >= 0");
    if (rc.thinning < 1) throw invalid_input("run.thinning must be >= 1");
    if (rc.theta_stride < 0) throw invalid_input("run.theta-stride must be >= 0");
    if (!(rc.burn_in_fraction >= 0.0 && rc.burn_in_fraction < 1.0))
        throw invalid_input("run.burn-in-fraction must lie in [0, 1)");
    if (rc.seeds.empty()) throw invalid_input("run.seeds needs at least one seed");
    {
        auto sorted = rc.seeds;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw invalid_input("run.seeds must be distinct");
    }
    if (!rc.x0.empty() && rc.x0.size() != static_cast<std::size_t>(rc.target.dimension))
        throw invalid_input("run.x0 length must match target.dimension");
    if (rc.rho < 0.0 || !std::isfinite(rc.rho))
        throw invalid_input("theta.rho must be >= 0");
    if (rc.oracle_trials < 1) throw invalid_input("oracle.trials must be >= 1");
    if (!(rc.mass_floor > 0.0) || rc.mass_floor >= 1.0)
        throw invalid_input("flat-hist.mass-floor must lie in (0, 1)");
    return rc;
}

void write_config_echo(const run_config& rc, std::ostream& os) {
    os << "# resolved run configuration (re-parseable)\n";
    os << "target.kind = " << kind_name(rc.target.kind) << '\n';
    os << "target.dimension = " << rc.target.dimension << '\n';
    os << "target.temperature = " << format_double(rc.target.temperature) << '\n';
    os << "target.dataset-size = " << rc.target.dataset_size << '\n';
    os << "target.batch-size = " << rc.target.batch_size << '\n';
    os << "target.gradient-noise-sigma = " << format_double(rc.target.gradient_noise_sigma)
       << '\n';
    os << "target.data-seed = " << rc.target.data_seed << '\n';
    os << "partition.m = " << rc.partition.m << '\n';
    os << "partition.u1 = " << format_double(rc.partition.u1) << '\n';
    os << "partition.delta-u = " << format_double(rc.partition.delta_u) << '\n';
    os << "kernel.kind = " << kind_name(rc.kernel.kind) << '\n';
    os << "kernel.epsilon = " << format_double(rc.kernel.epsilon) << '\n';
    os << "kernel.zeta = " << format_double(rc.kernel.zeta) << '\n';
    os << "kernel.momentum = " << format_double(rc.kernel.momentum) << '\n';
    os << "kernel.tau = " << format_double(rc.kernel.tau) << '\n';
    os << "kernel.epsilon-decay = " << format_double(rc.kernel.epsilon_decay) << '\n';
    os << "kernel.decay-every = " << rc.kernel.decay_every << '\n';
    os << "schedule.a = " << format_double(rc.schedule.A) << '\n';
    os << "schedule.alpha = " << format_double(rc.schedule.alpha) << '\n';
    os << "schedule.b = " << format_double(rc.schedule.B) << '\n';
    os << "theta.rho = " << format_double(rc.rho) << '\n';
    os << "run.steps = " << rc.steps << '\n';
    os << "run.thinning = " << rc.thinning << '\n';
    os << "run.theta-stride = " << rc.theta_stride << '\n';
    os << "run.burn-in-fraction = " << format_double(rc.burn_in_fraction) << '\n';
    os << "run.seeds = ";
    for (std::size_t i = 0; i < rc.seeds.size(); ++i)
        os << (i ? "," : "") << rc.seeds[i];
    os << '\n';
    if (!rc.x0.empty()) {
        os << "run.x0 = ";
        for (std::size_t i = 0; i < rc.x0.size(); ++i)
            os << (i ? "," : "") << format_double(rc.x0[i]);
        os << '\n';
    }
    os << "run.crossing-threshold = " << format_double(rc.crossing_threshold) << '\n';
    os << "run.rng = " << kRngId << '\n';
    os << "oracle.grid-lo = " << format_double(rc.grid.lo) << '\n';
    os << "oracle.grid-hi = " << format_double(rc.grid.hi) << '\n';
    os << "oracle.grid-points = " << rc.grid.points << '\n';
    os << "oracle.trials = " << rc.oracle_trials << '\n';
    os << "oracle.mode-a = " << format_double(rc.oracle_mode_a) << '\n';
    os << "oracle.mode-b = " << format_double(rc.oracle_mode_b) << '\n';
    os << "compare.reference-mean = " << format_double(rc.reference_mean) << '\n';
    os << "flat-hist.mass-floor = " << format_double(rc.mass_floor) << '\n';
}

run_summary run(const run_config& rc, exec_policy policy) {
    const auto t = make_target(rc.target);
    const long n_seeds = static_cast<long>(rc.seeds.size());

    run_summary out;
    out.seeds.resize(n_seeds);
    out.visit_counts.resize(n_seeds);
    out.final_thetas.resize(n_seeds);
    out.pooled_counts.assign(rc.partition.m, 0);

    if (oracle_available(*t, rc.grid)) {
        out.theta_star = theta_star(*t, rc.partition, rc.grid, policy).values();
        out.core_regions = core_mass_regions(out.theta_star);
    }

    const bool writing = !rc.output_dir.empty();
    fs::path root;
    if (writing) {
        root = rc.output_dir;
        fs::create_directories(root);
        std::ofstream echo = open_csv(root / "config_echo.cfg");
        write_config_echo(rc, echo);
    }

    const chain_options opts = make_chain_options(rc);
    const std::vector<double> x0 = initial_point(rc);
    const bool par = policy == exec_policy::openmp;

#pragma omp parallel for schedule(dynamic) if (par)
    for (long s = 0; s < n_seeds; ++s) {
        rng gen(rc.seeds[s]);
        chain_state state;
        state.x = x0;

        std::ofstream traj, trace;
        if (writing) {
            const fs::path dir = root / ("seed_" + std::to_string(rc.seeds[s]));
            fs::create_directories(dir);
            traj = open_csv(dir / "trajectory.csv");
            write_trajectory_header(traj);
            trace = open_csv(dir / "theta_trace.csv");
            trace << "step";
            for (int i = 1; i <= rc.partition.m; ++i) trace << ",theta_" << i;
            trace << '\n';
        }

        std::function<void(const chain_record&)> sink;
        std::function<void(long, const theta_estimate&)> theta_sink;
        if (writing) {
            sink = [&traj](const chain_record& rec) { write_trajectory_row(traj, rec); };
            theta_sink = [&trace](long step, const theta_estimate& th) {
                trace << step;
                for (double v : th.values()) trace << ',' << format_double(v);
                trace << '\n';
            };
        }

        chain_run_result res = run_chain(*t, rc.partition, rc.kernel, std::move(state),
                                         theta_estimate::uniform(rc.partition.m), opts,
                                         gen, sink, theta_sink);

        seed_summary& sum = out.seeds[s];
        sum.seed = rc.seeds[s];
        sum.diverged = res.diverged;
        sum.divergence_step = res.divergence_step;
        if (res.plain.count() > 0) {
            sum.plain_estimate = res.plain.estimate();
            sum.weighted_estimate = res.weighted.estimate();
        }
        sum.min_multiplier = res.min_multiplier;
        sum.negative_multiplier_steps = res.negative_multiplier_steps;
        sum.first_negative_multiplier_step = res.first_negative_multiplier_step;
        sum.first_crossing_step = res.first_crossing_step;
        sum.clamp_events = res.clamp_events;
        if (!out.theta_star.empty()) {
            sum.theta_l1 = l1_distance(res.theta.values(), out.theta_star);
            sum.theta_l1_core =
                l1_distance_on(res.theta.values(), out.theta_star, out.core_regions);
        }
        out.visit_counts[s] = std::move(res.visit_counts);
        out.final_thetas[s] = res.theta.values();
    }

    for (long s = 0; s < n_seeds; ++s) {
        out.any_diverged = out.any_diverged || out.seeds[s].diverged;
        for (int i = 0; i < rc.partition.m; ++i)
            out.pooled_counts[i] += out.visit_counts[s][i];
    }

    if (writing) {
        std::ofstream sumcsv = open_csv(root / "summary.csv");
        sumcsv << "seed,steps,diverged,divergence_step,plain_estimate,weighted_estimate,"
                  "theta_l1,theta_l1_core,min_multiplier,negative_multiplier_steps,"
                  "first_negative_multiplier_step,first_crossing_step,clamp_events\n";
        for (const seed_summary& s : out.seeds) {
            sumcsv << s.seed << ',' << rc.steps << ',' << (s.diverged ? 1 : 0) << ','
                   << s.divergence_step << ',' << format_double(s.plain_estimate) << ','
                   << format_double(s.weighted_estimate) << ','
                   << format_double(s.theta_l1) << ',' << format_double(s.theta_l1_core)
                   << ',' << format_double(s.min_multiplier) << ','
                   << s.negative_multiplier_steps << ','
                   << s.first_negative_multiplier_step << ',' << s.first_crossing_step
                   << ',' << s.clamp_events << '\n';
        }

        std::ofstream hist = open_csv(root / "histogram.csv");
        hist << "seed,region,count\n";
        for (long s = 0; s < n_seeds; ++s)
            for (int i = 0; i < rc.partition.m; ++i)
                hist << rc.seeds[s] << ',' << (i + 1) << ',' << out.visit_counts[s][i]
                     << '\n';
    }
    return out;
}

namespace {

// 20 log-spaced checkpoints from min(1000, steps) to steps, strictly
// increasing after rounding.
std::vector<long> log_checkpoints(long steps) {
    const double lo = static_cast<double>(std::min<long>(1000, steps));
    const double hi = static_cast<double>(steps);
    std::vector<long> cps;
    const int n = 20;
    for (int i = 0; i < n; ++i) {
        const double f = n == 1 ? 1.0 : static_cast<double>(i) / (n - 1);
        const double v = std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo)));
        long c = std::lround(v);
        c = std::clamp(c, static_cast<long>(lo), steps);
        if (cps.empty() || c > cps.back()) cps.push_back(c);
    }
    if (cps.empty() || cps.back() != steps) cps.push_back(steps);
    return cps;
}

struct trace_buffers {
    std::vector<double> value;   // f(x_k), k = 1..steps
    std::vector<double> weight;  // importance weight paired with x_k
};

// Post-burn-in weighted mean over (burn(c), c] for each checkpoint, via
// prefix sums of w*f and w.
std::vector<double> checkpoint_estimates(const trace_buffers& tb,
                                         const std::vector<long>& cps,
                                         double burn_in_fraction) {
    const std::size_t n = tb.value.size();
    std::vector<double> pref_wf(n + 1, 0.0), pref_w(n + 1, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        pref_wf[k + 1] = pref_wf[k] + tb.weight[k] * tb.value[k];
        pref_w[k + 1] = pref_w[k] + tb.weight[k];
    }
    std::vector<double> est;
    est.reserve(cps.size());
    for (long c : cps) {
        const long hi = std::min<long>(c, static_cast<long>(n));
        const long lo = static_cast<long>(
            std::floor(burn_in_fraction * static_cast<double>(c)));
        const double w = pref_w[hi] - pref_w[lo];
        est.push_back(w > 0.0 ? (pref_wf[hi] - pref_wf[lo]) / w
                              : std::numeric_limits<double>::quiet_NaN());
    }
    return est;
}

}  // namespace

compare_summary compare(const run_config& rc, exec_policy policy) {
    const auto t = make_target(rc.target);
    if (!oracle_available(*t, rc.grid))
        throw invalid_input("compare needs a target the quadrature oracle covers");
    if (rc.steps < 1) throw invalid_input("compare needs run.steps >= 1");

    compare_summary out;
    const theta_estimate star = theta_star(*t, rc.partition, rc.grid, policy);
    out.theta_star = star.values();
    out.checkpoints = log_checkpoints(rc.steps);

    const long n_seeds = static_cast<long>(rc.seeds.size());
    const std::vector<double> x0 = initial_point(rc);

    std::array<kernel_config, 3> kernels;
    for (auto& k : kernels) k = rc.kernel;
    kernels[0].kind = kernel_kind::sgld;
    kernels[1].kind = kernel_kind::csgld;
    kernels[2].kind = kernel_kind::ksgld;

    for (int m = 0; m < 3; ++m) {
        out.mean_abs_error[m].assign(out.checkpoints.size(), 0.0);
        out.final_estimates[m].assign(n_seeds, 0.0);
        out.final_abs_errors[m].assign(n_seeds, 0.0);
    }

    chain_options opts = make_chain_options(rc);
    opts.thinning = 1;       // the error curves need every step
    opts.theta_stride = 0;
    opts.estimator_start = 0;  // burn-in is applied per checkpoint instead

    std::vector<std::array<std::vector<double>, 3>> per_seed_est(n_seeds);
    const bool par = policy == exec_policy::openmp;

#pragma omp parallel for schedule(dynamic) if (par)
    for (long s = 0; s < n_seeds; ++s) {
        for (int m = 0; m < 3; ++m) {
            rng gen(rc.seeds[s]);
            chain_state state;
            state.x = x0;

            trace_buffers tb;
            tb.value.reserve(rc.steps);
            tb.weight.reserve(rc.steps);
            const bool weighted = kernels[m].kind != kernel_kind::sgld;
            auto sink = [&tb, weighted](const chain_record& rec) {
                tb.value.push_back(rec.x_first);
                tb.weight.push_back(weighted ? rec.importance_weight : 1.0);
            };

            theta_estimate theta0 = kernels[m].kind == kernel_kind::ksgld
                                        ? star
                                        : theta_estimate::uniform(rc.partition.m);
            run_chain(*t, rc.partition, kernels[m], state, std::move(theta0), opts, gen,
                      sink);

            per_seed_est[s][m] =
                checkpoint_estimates(tb, out.checkpoints, rc.burn_in_fraction);
        }
    }

    for (int m = 0; m < 3; ++m) {
        for (std::size_t c = 0; c < out.checkpoints.size(); ++c) {
            double acc = 0.0;
            for (long s = 0; s < n_seeds; ++s)
                acc += std::abs(per_seed_est[s][m][c] - rc.reference_mean);
            out.mean_abs_error[m][c] = acc / static_cast<double>(n_seeds);
        }
        for (long s = 0; s < n_seeds; ++s) {
            const double est = per_seed_est[s][m].back();
            out.final_estimates[m][s] = est;
            out.final_abs_errors[m][s] = std::abs(est - rc.reference_mean);
        }
    }

    if (!rc.output_dir.empty()) {
        const fs::path root = rc.output_dir;
        fs::create_directories(root);
        std::ofstream echo = open_csv(root / "config_echo.cfg");
        write_config_echo(rc, echo);

        std::ofstream curves = open_csv(root / "error_curves.csv");
        curves << "method,step,mean_abs_error\n";
        for (int m = 0; m < 3; ++m)
            for (std::size_t c = 0; c < out.checkpoints.size(); ++c)
                curves << compare_summary::kMethods[m] << ',' << out.checkpoints[c] << ','
                       << format_double(out.mean_abs_error[m][c]) << '\n';

        std::ofstream finals = open_csv(root / "final_errors.csv");
        finals << "method,seed,estimate,abs_error\n";
        for (int m = 0; m < 3; ++m)
            for (long s = 0; s < n_seeds; ++s)
                finals << compare_summary::kMethods[m] << ',' << rc.seeds[s] << ','
                       << format_double(out.final_estimates[m][s]) << ','
                       << format_double(out.final_abs_errors[m][s]) << '\n';
    }
    return out;
}

flat_hist_summary flat_histogram_report(const std::vector<long>& pooled_counts,
                                        const std::vector<double>& theta_star,
                                        double mass_floor) {
    if (pooled_counts.size() != theta_star.size())
        throw invalid_input("histogram and theta* sizes differ");
    if (!(mass_floor > 0.0) || mass_floor >= 1.0)
        throw invalid_input("mass floor must lie in (0, 1)");

    flat_hist_summary out;
    out.counts = pooled_counts;
    out.theta_star = theta_star;
    out.mass_floor = mass_floor;
    for (std::size_t i = 0; i < theta_star.size(); ++i)
        if (theta_star[i] >= mass_floor) out.covered.push_back(static_cast<int>(i) + 1);
    if (out.covered.empty()) throw invalid_input("no region reaches the mass floor");

    long lo = std::numeric_limits<long>::max();
    long hi = 0;
    for (int r : out.covered) {
        lo = std::min(lo, pooled_counts[r - 1]);
        hi = std::max(hi, pooled_counts[r - 1]);
    }
    out.max_min_ratio = lo > 0 ? static_cast<double>(hi) / static_cast<double>(lo)
                               : std::numeric_limits<double>::infinity();
    return out;
}

flat_hist_summary flat_histogram_from_dir(const std::string& run_dir, exec_policy policy) {
    const fs::path root = run_dir;
    const config cfg = config::parse_file((root / "config_echo.cfg").string());
    run_config rc = load_run_config(cfg);

    const auto t = make_target(rc.target);
    if (!oracle_available(*t, rc.grid))
        throw invalid_input("flat-hist needs a target the quadrature oracle covers");
    const theta_estimate star = theta_star(*t, rc.partition, rc.grid, policy);

    std::ifstream hist(root / "histogram.csv");
    if (!hist) throw invalid_input("cannot read histogram.csv under '" + run_dir + "'");
    std::vector<long> pooled(rc.partition.m, 0);
    std::string line;
    if (!std::getline(hist, line) || line.rfind("seed,region,count", 0) != 0)
        throw invalid_input("histogram.csv has an unexpected header");
    long line_no = 1;
    while (std::getline(hist, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream in(line);
        std::string seed_s, region_s, count_s;
        if (!std::getline(in, seed_s, ',') || !std::getline(in, region_s, ',') ||
            !std::getline(in, count_s))
            throw config_error("malformed histogram row", static_cast<int>(line_no));
        const long region = std::stol(region_s);
        if (region < 1 || region > rc.partition.m)
            throw config_error("histogram region out of range", static_cast<int>(line_no));
        pooled[region - 1] += std::stol(count_s);
    }

    flat_hist_summary out = flat_histogram_report(pooled, star.values(), rc.mass_floor);

    std::ofstream fh = open_csv(root / "flat_hist.csv");
    fh << "region,count,theta_star,covered\n";
    for (int i = 1; i <= rc.partition.m; ++i) {
        const bool cov =
            std::binary_search(out.covered.begin(), out.covered.end(), i);
        fh << i << ',' << out.counts[i - 1] << ',' << format_double(out.theta_star[i - 1])
           << ',' << (cov ? 1 : 0) << '\n';
    }
    return out;
}

oracle_summary oracle_report(const run_config& rc, exec_policy policy) {
    const auto t = make_target(rc.target);
    if (!oracle_available(*t, rc.grid))
        throw invalid_input("oracle needs a 1-D target with a usable tail bound");

    oracle_summary out;
    const theta_estimate star = theta_star(*t, rc.partition, rc.grid, policy);
    out.theta_star = star.values();
    out.curves = flattened_density(*t, rc.partition, star, rc.kernel.zeta, rc.grid, policy);
    out.barrier_original = energy_barrier(out.curves.x, out.curves.energy,
                                          rc.oracle_mode_a, rc.oracle_mode_b);
    out.barrier_flattened = energy_barrier(out.curves.x, out.curves.flat_energy,
                                           rc.oracle_mode_a, rc.oracle_mode_b);
    out.z_theta_star = z_theta_star(star, rc.kernel.zeta);

    rng gen(rc.seeds.front());
    out.stability = stability_check(*t, rc.partition, rc.kernel.zeta, rc.grid,
                                    rc.oracle_trials, gen, policy);

    if (!rc.output_dir.empty()) {
        const fs::path root = rc.output_dir;
        fs::create_directories(root);
        std::ofstream echo = open_csv(root / "config_echo.cfg");
        write_config_echo(rc, echo);

        std::ofstream star_csv = open_csv(root / "theta_star.csv");
        star_csv << "region,u_lo,u_hi,theta_star\n";
        for (int i = 1; i <= rc.partition.m; ++i) {
            const double lo = i == 1 ? -std::numeric_limits<double>::infinity()
                                     : rc.partition.boundary(i - 1);
            const double hi = i == rc.partition.m
                                  ? std::numeric_limits<double>::infinity()
                                  : rc.partition.boundary(i);
            star_csv << i << ',' << format_double(lo) << ',' << format_double(hi) << ','
                     << format_double(out.theta_star[i - 1]) << '\n';
        }

        std::ofstream flat = open_csv(root / "flattened.csv");
        flat << "x,density,energy,flat_energy\n";
        for (std::size_t g = 0; g < out.curves.x.size(); ++g)
            flat << format_double(out.curves.x[g]) << ','
                 << format_double(out.curves.density[g]) << ','
                 << format_double(out.curves.energy[g]) << ','
                 << format_double(out.curves.flat_energy[g]) << '\n';

        std::ofstream stab = open_csv(root / "stability.csv");
        stab << "trial,s,ratio\n";
        for (std::size_t i = 0; i < out.stability.trials.size(); ++i)
            stab << (i + 1) << ',' << format_double(out.stability.trials[i].s) << ','
                 << format_double(out.stability.trials[i].ratio) << '\n';

        std::ofstream bar = open_csv(root / "barrier.csv");
        bar << "curve,barrier\n";
        bar << "original," << format_double(out.barrier_original) << '\n';
        bar << "flattened," << format_double(out.barrier_flattened) << '\n';
    }
    return out;
}

}  // namespace csgld
