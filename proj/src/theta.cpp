#include "csgld/theta.hpp"

#include <cmath>
#include <cstring>

namespace csgld {
namespace {

void check_region_index(int j, int m) {
    if (j < 1 || j > m) throw invalid_input("region index out of range");
}

void check_omega(double omega) {
    if (!(omega >= 0.0) || omega > 1.0 || !std::isfinite(omega))
        throw invalid_input("omega must lie in [0, 1]");
}

// Clamp components below the floor and renormalize. Returns true if any
// component was clamped.
bool enforce_floor(std::vector<double>& v) {
    bool clamped = false;
    for (double& c : v)
        if (c < theta_estimate::kFloor) {
            c = theta_estimate::kFloor;
            clamped = true;
        }
    if (clamped) {
        double s = 0.0;
        for (double c : v) s += c;
        for (double& c : v) c /= s;
    }
    return clamped;
}

}  // namespace

theta_estimate::theta_estimate(std::vector<double> values) : v_(std::move(values)) {
    if (v_.empty()) throw invalid_input("theta must have at least one component");
    double s = 0.0;
    for (double c : v_) {
        if (!(c > 0.0) || !std::isfinite(c))
            throw invalid_input("theta components must be strictly positive");
        s += c;
    }
    if (std::abs(s - 1.0) > 1e-9) throw invalid_input("theta must sum to 1");
}

theta_estimate theta_estimate::uniform(int m) {
    if (m < 1) throw invalid_input("m must be >= 1");
    theta_estimate t;
    t.v_.assign(m, 1.0 / m);
    return t;
}

double theta_estimate::sum() const {
    double s = 0.0;
    for (double c : v_) s += c;
    return s;
}

void validate(const step_schedule& s) {
    if (!(s.A >= 0.0) || !std::isfinite(s.A)) throw invalid_input("schedule A must be >= 0");
    if (!(s.B >= 0.0) || !std::isfinite(s.B)) throw invalid_input("schedule B must be >= 0");
    if (!(s.alpha > 0.0) || s.alpha > 1.0) throw invalid_input("schedule alpha must be in (0, 1]");
    if (s.A > 0.0 && s.B == 0.0 && s.alpha == 0.0)
        throw invalid_input("schedule must be bounded at k = 1");
}

double step_size(const step_schedule& s, long k) {
    if (k < 1) throw invalid_input("step index must be >= 1");
    return s.A / (std::pow(static_cast<double>(k), s.alpha) + s.B);
}

theta_estimate sa_update(theta_estimate theta, int j_tilde, double omega, double zeta,
                         bool* clamped) {
    check_region_index(j_tilde, theta.size());
    check_omega(omega);
    auto& v = theta.v_;
    const double w = std::pow(v[j_tilde - 1], zeta);
    for (int i = 0; i < static_cast<int>(v.size()); ++i) {
        const double ind = (i == j_tilde - 1) ? 1.0 : 0.0;
        v[i] += omega * (w * (ind - v[i]));
    }
    const bool c = enforce_floor(v);
    if (clamped) *clamped = c;
    return theta;
}

theta_estimate sa_update_regularized(theta_estimate theta, int j_tilde, double omega,
                                     double zeta, double rho, bool* clamped) {
    check_region_index(j_tilde, theta.size());
    check_omega(omega);
    if (!(rho >= 0.0) || !std::isfinite(rho)) throw invalid_input("rho must be >= 0");
    auto& v = theta.v_;
    const double w = std::pow(v[j_tilde - 1], zeta);
    for (int i = 0; i < static_cast<int>(v.size()); ++i) {
        const double ind = (i == j_tilde - 1) ? 1.0 : 0.0;
        const double reg = (i >= j_tilde - 1) ? omega * rho : 0.0;
        v[i] += omega * ((w + reg) * (ind - v[i]));
    }
    if (rho != 0.0) {
        // Project the O(omega^2 rho) drift back onto the simplex.
        double s = 0.0;
        for (double c : v) s += c;
        for (double& c : v) c /= s;
    }
    const bool c = enforce_floor(v);
    if (clamped) *clamped = c;
    return theta;
}

std::vector<double> random_field(const theta_estimate& theta, int j_tilde, double zeta) {
    check_region_index(j_tilde, theta.size());
    const auto& v = theta.values();
    const double w = std::pow(v[j_tilde - 1], zeta);
    std::vector<double> h(v.size());
    for (int i = 0; i < static_cast<int>(v.size()); ++i) {
        const double ind = (i == j_tilde - 1) ? 1.0 : 0.0;
        h[i] = w * (ind - v[i]);
    }
    return h;
}

std::uint64_t theta_hash(const theta_estimate& theta) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (double c : theta.values()) {
        std::uint64_t bits;
        std::memcpy(&bits, &c, sizeof bits);
        for (int b = 0; b < 8; ++b) {
            h ^= (bits >> (8 * b)) & 0xffull;
            h *= 0x100000001b3ull;
        }
    }
    return h;
}

}  // namespace csgld
