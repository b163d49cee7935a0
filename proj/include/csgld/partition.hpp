#pragma once

#include "csgld/target.hpp"
#include "csgld/theta_fwd.hpp"

namespace csgld {

// Uniform partition of the energy axis into m regions
//   region 1: U <= u1
//   region i: u_{i-1} < U <= u_i    with u_i = u1 + (i-1) delta_u
//   region m: U > u_{m-1}
// m == 1 degenerates to a single all-covering region (no boundaries).
struct energy_partition {
    int m = 2;
    double u1 = 0.0;
    double delta_u = 1.0;

    // u_i for i in [1, m-1].
    double boundary(int i) const { return u1 + (i - 1) * delta_u; }
};

// Throws invalid_input unless m >= 1, delta_u > 0 and both are finite.
void validate(const energy_partition& p);

// Region index J(energy) in [1, m]; clamps below u1 and above u_{m-1}.
// NaN energy is invalid.
int index_of(const energy_partition& p, double energy);

// Index of the scaled stochastic energy, J-tilde = J((N/n) U-tilde).
int stochastic_index(const energy_partition& p, const gradient_eval& eval);

// Piecewise log-linear interpolation of theta along the energy axis:
//   Psi(u) = theta(i-1) * exp((log theta(i) - log theta(i-1)) (u - u_{i-1}) / delta_u)
// on region i, with theta(0) := theta(1) (so Psi is flat below u1) and the
// exponent capped at one bandwidth above u_{m-1} (flat at theta(m) beyond).
// Continuous in u, and on each region Psi lies between the two bracketing
// theta components.
double psi(const energy_partition& p, const theta_estimate& theta, double u);

// Gradient multiplier of the flattened dynamics at region j:
//   1 + zeta * tau * (log theta(j) - log theta((j-1) v 1)) / delta_u.
// Equals 1 at j == 1 and under uniform theta; negative values are the
// "bounce" regime that pushes the sampler uphill.
double grad_multiplier(const energy_partition& p, const theta_estimate& theta, int j,
                       double zeta, double tau);

}  // namespace csgld
