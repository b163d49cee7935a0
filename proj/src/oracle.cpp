#include "csgld/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "csgld/errors.hpp"
#include "csgld/estimators.hpp"

namespace csgld {
namespace {

double log_weight(const target& t, const energy_partition& p, const theta_estimate* theta,
                  double zeta, double u) {
    double lw = -u / t.spec().temperature;
    if (theta && zeta != 0.0) lw -= zeta * std::log(psi(p, *theta, u));
    return lw;
}

// Solves U(x) = level inside a cell [a, b] with U(a) <= level < U(b) or
// U(b) <= level < U(a); returns the split point (bisection, 60 iterations).
double bisect_boundary(const target& t, double a, double b, double ua, double ub,
                       double level) {
    double lo = a, hi = b;
    bool lo_below = ua <= level;
    (void)ub;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double umid = t.energy(std::span<const double>(&mid, 1));
        if ((umid <= level) == lo_below)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

void validate(const quadrature_grid& grid, const target& t) {
    if (t.dimension() != 1)
        throw invalid_input("quadrature oracle supports one-dimensional targets only");
    if (!(grid.lo < grid.hi) || !std::isfinite(grid.lo) || !std::isfinite(grid.hi))
        throw invalid_input("grid interval must be finite with lo < hi");
    if (grid.points < 1000) throw invalid_input("grid needs at least 1000 points");
    const double tail = t.tail_mass_bound(grid.lo, grid.hi);
    if (!(tail < quadrature_grid::kTailTolerance))
        throw invalid_input("grid interval leaves too much target mass outside");
}

region_mass_result region_masses(const target& t, const energy_partition& p,
                                 const quadrature_grid& grid, const theta_estimate* theta,
                                 double zeta, exec_policy policy) {
    validate(grid, t);
    validate(p);
    if (theta && theta->size() != p.m)
        throw invalid_input("theta size does not match partition");

    const long n = grid.points;
    const double h = grid.spacing();
    std::vector<double> u(n), lw(n);

    for_each_chunk(n, policy, [&](long, long begin, long end) {
        for (long g = begin; g < end; ++g) {
            const double x = grid.point(g);
            u[g] = t.energy(std::span<const double>(&x, 1));
            lw[g] = log_weight(t, p, theta, zeta, u[g]);
        }
    });

    // Log-domain shift: per-chunk maxima combined serially.
    const long chunks = chunk_count(n);
    std::vector<double> chunk_max(chunks, -std::numeric_limits<double>::infinity());
    for_each_chunk(n, policy, [&](long c, long begin, long end) {
        double m = -std::numeric_limits<double>::infinity();
        for (long g = begin; g < end; ++g) m = std::max(m, lw[g]);
        chunk_max[c] = m;
    });
    double shift = -std::numeric_limits<double>::infinity();
    for (double m : chunk_max) shift = std::max(shift, m);

    // Cell pass: trapezoid masses per region, boundary-straddling cells split
    // by bisection. Partials are per-chunk and combined in index order so the
    // result is identical under any policy or thread count.
    const long cells = n - 1;
    const long cell_chunks = chunk_count(cells);
    std::vector<std::vector<double>> partial(cell_chunks);
    for_each_chunk(cells, policy, [&](long c, long begin, long end) {
        std::vector<double> local(p.m, 0.0);
        for (long g = begin; g < end; ++g) {
            const double x0 = grid.point(g), x1 = grid.point(g + 1);
            const double u0 = u[g], u1 = u[g + 1];
            const double w0 = std::exp(lw[g] - shift), w1 = std::exp(lw[g + 1] - shift);
            const int j0 = index_of(p, u0), j1 = index_of(p, u1);
            if (j0 == j1) {
                local[j0 - 1] += 0.5 * (x1 - x0) * (w0 + w1);
                continue;
            }
            const int dir = j1 > j0 ? 1 : -1;
            double xa = x0, wa = w0, ua = u0;
            int ja = j0;
            while (ja != j1) {
                const double level = dir > 0 ? p.boundary(ja) : p.boundary(ja - 1);
                const double xs = bisect_boundary(t, xa, x1, ua, u1, level);
                const double us = t.energy(std::span<const double>(&xs, 1));
                const double ws = std::exp(log_weight(t, p, theta, zeta, us) - shift);
                local[ja - 1] += 0.5 * (xs - xa) * (wa + ws);
                xa = xs;
                wa = ws;
                ua = us;
                ja += dir;
            }
            local[ja - 1] += 0.5 * (x1 - xa) * (wa + w1);
        }
        partial[c] = std::move(local);
    });

    region_mass_result out;
    out.mass.assign(p.m, 0.0);
    std::vector<kahan_sum> acc(p.m);
    for (long c = 0; c < cell_chunks; ++c)
        for (int i = 0; i < p.m; ++i) acc[i].add(partial[c][i]);
    kahan_sum total;
    for (int i = 0; i < p.m; ++i) {
        out.mass[i] = acc[i].value();
        total.add(out.mass[i]);
    }
    out.total = total.value();
    if (!(out.total > 0.0) || !std::isfinite(out.total))
        throw invalid_input("quadrature produced a non-positive normalizer");
    return out;
}

theta_estimate theta_star(const target& t, const energy_partition& p,
                          const quadrature_grid& grid, exec_policy policy) {
    const auto rm = region_masses(t, p, grid, nullptr, 0.0, policy);
    std::vector<double> v(rm.mass.size());
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = std::max(rm.mass[i] / rm.total, theta_estimate::kFloor);
        s += v[i];
    }
    for (double& c : v) c /= s;
    return theta_estimate(std::move(v));
}

flattened_curves flattened_density(const target& t, const energy_partition& p,
                                   const theta_estimate& theta, double zeta,
                                   const quadrature_grid& grid, exec_policy policy) {
    validate(grid, t);
    validate(p);
    if (theta.size() != p.m) throw invalid_input("theta size does not match partition");

    const long n = grid.points;
    flattened_curves out;
    out.x.resize(n);
    out.density.resize(n);
    out.energy.resize(n);
    out.flat_energy.resize(n);
    std::vector<double> lw(n);

    for_each_chunk(n, policy, [&](long, long begin, long end) {
        for (long g = begin; g < end; ++g) {
            out.x[g] = grid.point(g);
            out.energy[g] = t.energy(std::span<const double>(&out.x[g], 1));
            lw[g] = log_weight(t, p, &theta, zeta, out.energy[g]);
        }
    });

    const long chunks = chunk_count(n);
    std::vector<double> chunk_max(chunks, -std::numeric_limits<double>::infinity());
    for_each_chunk(n, policy, [&](long c, long begin, long end) {
        double m = -std::numeric_limits<double>::infinity();
        for (long g = begin; g < end; ++g) m = std::max(m, lw[g]);
        chunk_max[c] = m;
    });
    double shift = -std::numeric_limits<double>::infinity();
    for (double m : chunk_max) shift = std::max(shift, m);

    std::vector<double> chunk_sum(chunks, 0.0);
    for_each_chunk(n, policy, [&](long c, long begin, long end) {
        double s = 0.0;
        for (long g = begin; g < end; ++g) {
            const double w = std::exp(lw[g] - shift);
            const double edge = (g == 0 || g == n - 1) ? 0.5 : 1.0;
            s += edge * w;
        }
        chunk_sum[c] = s;
    });
    kahan_sum total;
    for (double s : chunk_sum) total.add(s);
    const double log_norm = shift + std::log(total.value() * grid.spacing());

    const double tau = t.spec().temperature;
    for_each_chunk(n, policy, [&](long, long begin, long end) {
        for (long g = begin; g < end; ++g) {
            out.density[g] = std::exp(lw[g] - log_norm);
            out.flat_energy[g] = -tau * (lw[g] - log_norm);
        }
    });
    return out;
}

double energy_barrier(std::span<const double> x, std::span<const double> energy,
                      double mode_a, double mode_b, double halfwidth) {
    if (x.size() != energy.size() || x.size() < 3)
        throw invalid_input("energy curve needs matching x/energy samples");
    const double lo_mode = std::min(mode_a, mode_b), hi_mode = std::max(mode_a, mode_b);
    double peak = -std::numeric_limits<double>::infinity();
    double base_a = std::numeric_limits<double>::infinity();
    double base_b = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < x.size(); ++g) {
        const double xv = x[g], e = energy[g];
        if (xv >= lo_mode && xv <= hi_mode) peak = std::max(peak, e);
        if (std::abs(xv - mode_a) <= halfwidth) base_a = std::min(base_a, e);
        if (std::abs(xv - mode_b) <= halfwidth) base_b = std::min(base_b, e);
    }
    if (!std::isfinite(peak) || !std::isfinite(base_a) || !std::isfinite(base_b))
        throw invalid_input("curve does not cover the modes");
    return peak - std::min(base_a, base_b);
}

std::vector<double> mean_field(const target& t, const energy_partition& p,
                               const theta_estimate& theta, double zeta,
                               const quadrature_grid& grid, exec_policy policy) {
    const auto rm = region_masses(t, p, grid, &theta, zeta, policy);
    std::vector<double> h(p.m);
    double s = 0.0;
    for (int i = 1; i <= p.m; ++i)
        s += std::pow(theta.value(i), zeta) * (rm.mass[i - 1] / rm.total);
    for (int i = 1; i <= p.m; ++i)
        h[i - 1] = std::pow(theta.value(i), zeta) * (rm.mass[i - 1] / rm.total) -
                   theta.value(i) * s;
    return h;
}

stability_report stability_check(const target& t, const energy_partition& p, double zeta,
                                 const quadrature_grid& grid, int trials, rng& gen,
                                 exec_policy policy) {
    if (trials < 1) throw invalid_input("stability check needs at least one trial");
    const theta_estimate star = theta_star(t, p, grid, policy);

    stability_report rep;
    rep.trials.reserve(trials);
    rep.max_s = -std::numeric_limits<double>::infinity();
    rep.max_ratio = -std::numeric_limits<double>::infinity();
    int negative = 0;

    for (int trial = 0; trial < trials; ++trial) {
        // Dirichlet(1, ..., 1): normalized unit exponentials, floored.
        std::vector<double> v(p.m);
        double s = 0.0;
        for (double& c : v) {
            c = -std::log1p(-gen.uniform());
            s += c;
        }
        for (double& c : v) c = std::max(c / s, theta_estimate::kFloor);
        s = 0.0;
        for (double c : v) s += c;
        for (double& c : v) c /= s;
        theta_estimate theta{std::move(v)};

        const auto h = mean_field(t, p, theta, zeta, grid, policy);
        double dot = 0.0, dist2 = 0.0;
        for (int i = 1; i <= p.m; ++i) {
            const double d = theta.value(i) - star.value(i);
            dot += h[i - 1] * d;
            dist2 += d * d;
        }
        const double ratio = dot / dist2;
        rep.trials.push_back({dot, ratio});
        if (dot < 0.0) ++negative;
        if (dot > rep.max_s) {
            rep.max_s = dot;
            rep.worst_theta = theta.values();
        }
        rep.max_ratio = std::max(rep.max_ratio, ratio);
    }
    rep.fraction_negative = static_cast<double>(negative) / trials;
    return rep;
}

}  // namespace csgld
