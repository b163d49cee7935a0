#include "csgld/partition.hpp"

#include <cmath>

#include "csgld/errors.hpp"
#include "csgld/theta.hpp"

namespace csgld {

void validate(const energy_partition& p) {
    if (p.m < 1) throw invalid_input("partition needs at least one region");
    if (!(p.delta_u > 0.0) || !std::isfinite(p.delta_u))
        throw invalid_input("delta_u must be positive");
    if (!std::isfinite(p.u1)) throw invalid_input("u1 must be finite");
}

int index_of(const energy_partition& p, double energy) {
    if (std::isnan(energy)) throw invalid_input("energy is NaN");
    if (p.m == 1) return 1;
    // ceil((U - u1) / delta_u) + 1 lands exactly on region i for
    // u_{i-1} < U <= u_i; clamp covers both unbounded end regions.
    const double r = std::ceil((energy - p.u1) / p.delta_u) + 1.0;
    if (r < 1.0) return 1;
    if (r > p.m) return p.m;
    return static_cast<int>(r);
}

int stochastic_index(const energy_partition& p, const gradient_eval& eval) {
    return index_of(p, eval.energy_scaled);
}

double psi(const energy_partition& p, const theta_estimate& theta, double u) {
    if (theta.size() != p.m) throw invalid_input("theta size does not match partition");
    if (std::isnan(u)) throw invalid_input("energy is NaN");
    const int j = index_of(p, u);
    if (j == 1) return theta.value(1);
    // Fractional position inside region j, capped at 1 so the top region
    // extrapolates flat beyond one bandwidth.
    double t = (u - p.boundary(j - 1)) / p.delta_u;
    if (t > 1.0) t = 1.0;
    const double lo = theta.value(j - 1);
    const double hi = theta.value(j);
    return lo * std::exp((std::log(hi) - std::log(lo)) * t);
}

double grad_multiplier(const energy_partition& p, const theta_estimate& theta, int j,
                       double zeta, double tau) {
    if (theta.size() != p.m) throw invalid_input("theta size does not match partition");
    if (j < 1 || j > p.m) throw invalid_input("region index out of range");
    const int jm = (j - 1 > 1) ? j - 1 : 1;
    return 1.0 + zeta * tau * (std::log(theta.value(j)) - std::log(theta.value(jm))) / p.delta_u;
}

}  // namespace csgld
