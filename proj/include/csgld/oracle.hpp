#pragma once

#include <vector>

#include "csgld/parallel.hpp"
#include "csgld/partition.hpp"
#include "csgld/target.hpp"
#include "csgld/theta.hpp"

namespace csgld {

// Uniform quadrature grid on [lo, hi] for 1-D targets. The target must leave
// less than kTailTolerance of pi-mass outside the interval.
struct quadrature_grid {
    double lo = -16.0;
    double hi = 14.0;
    long points = 1'000'001;

    static constexpr double kTailTolerance = 1e-10;

    double spacing() const { return (hi - lo) / static_cast<double>(points - 1); }
    double point(long g) const { return lo + spacing() * static_cast<double>(g); }
};

// Throws invalid_input unless lo < hi, points >= 1000, and the target's tail
// bound meets kTailTolerance.
void validate(const quadrature_grid& grid, const target& t);

// Trapezoid masses of pi(x) / Psi_theta(U(x))^zeta per energy region
// (unnormalized, log-domain shifted). Cells whose endpoints disagree on the
// region are split at the energy boundary by bisection so the per-region
// split converges at the same order as the trapezoid rule. theta == nullptr
// means zeta = 0 (plain pi masses).
struct region_mass_result {
    std::vector<double> mass;  // size m, sums to total
    double total = 0.0;
};
region_mass_result region_masses(const target& t, const energy_partition& p,
                                 const quadrature_grid& grid,
                                 const theta_estimate* theta = nullptr, double zeta = 0.0,
                                 exec_policy policy = exec_policy::openmp);

// Ground-truth region probabilities theta*(i) = integral of pi over region i,
// normalized to sum exactly 1; empty regions are floored at the theta floor.
theta_estimate theta_star(const target& t, const energy_partition& p,
                          const quadrature_grid& grid,
                          exec_policy policy = exec_policy::openmp);

// Pointwise flattened density pi(x)/Psi_theta(U(x))^zeta on the grid,
// normalized to integrate to 1, plus the matching energies: original U(x)
// and flattened -tau log density. zeta = 0 reproduces pi.
struct flattened_curves {
    std::vector<double> x;
    std::vector<double> density;
    std::vector<double> energy;       // original U
    std::vector<double> flat_energy;  // -tau log density
};
flattened_curves flattened_density(const target& t, const energy_partition& p,
                                   const theta_estimate& theta, double zeta,
                                   const quadrature_grid& grid,
                                   exec_policy policy = exec_policy::openmp);

// Inter-mode barrier of an energy curve: max energy between the two mode
// locations minus the lower of the two neighborhood minima (neighborhood =
// mode +/- halfwidth).
double energy_barrier(std::span<const double> x, std::span<const double> energy,
                      double mode_a, double mode_b, double halfwidth = 1.0);

// Mean field h(theta) of the stochastic approximation under the flattened
// density: h_i = theta(i)^zeta a_i - theta(i) sum_j theta(j)^zeta a_j where
// a_j is the normalized mass of pi/Psi_theta^zeta on region j. Sums to zero;
// at zeta == 0 it reduces to theta* - theta.
std::vector<double> mean_field(const target& t, const energy_partition& p,
                               const theta_estimate& theta, double zeta,
                               const quadrature_grid& grid,
                               exec_policy policy = exec_policy::openmp);

// Draws `trials` Dirichlet(1,...,1) vectors theta and evaluates the drift
// condition s = <h(theta), theta - theta*>; r = s / |theta - theta*|^2.
// Negative s for every draw is the empirical stability certificate; at
// zeta == 0, r == -1 up to quadrature error.
struct stability_trial {
    double s = 0.0;
    double ratio = 0.0;
};
struct stability_report {
    std::vector<stability_trial> trials;
    double max_s = 0.0;
    double max_ratio = 0.0;
    double fraction_negative = 0.0;
    std::vector<double> worst_theta;  // argmax s
};
stability_report stability_check(const target& t, const energy_partition& p, double zeta,
                                 const quadrature_grid& grid, int trials, rng& gen,
                                 exec_policy policy = exec_policy::openmp);

}  // namespace csgld
