#pragma once

#include <cstdint>
#include <vector>

#include "csgld/errors.hpp"

namespace csgld {

// Probability vector over the m energy regions. Components are kept strictly
// positive (floor 1e-12, re-normalized on clamp) and sum to 1 up to rounding.
// Region indices are 1-based throughout, matching index_of().
class theta_estimate {
  public:
    static constexpr double kFloor = 1e-12;

    explicit theta_estimate(std::vector<double> values);
    static theta_estimate uniform(int m);

    int size() const { return static_cast<int>(v_.size()); }
    double value(int i) const { return v_[i - 1]; }  // i in [1, m]
    const std::vector<double>& values() const { return v_; }

    double sum() const;

  private:
    friend theta_estimate sa_update(theta_estimate theta, int j_tilde, double omega,
                                    double zeta, bool* clamped);
    friend theta_estimate sa_update_regularized(theta_estimate theta, int j_tilde,
                                                double omega, double zeta, double rho,
                                                bool* clamped);
    theta_estimate() = default;
    std::vector<double> v_;
};

// Step-size schedule omega_k = A / (k^alpha + B), decreasing in k. A == 0
// freezes theta (used to pin a known theta). The asymptotic theory wants
// alpha in (1/2, 1]; values down to 0 are accepted for desk experiments.
struct step_schedule {
    double A = 1.0;
    double alpha = 0.6;
    double B = 100.0;
};

void validate(const step_schedule& s);

// omega_k for step index k >= 1.
double step_size(const step_schedule& s, long k);

// Stochastic-approximation update
//   theta'(i) = theta(i) + omega * theta(j~)^zeta * (1{i = j~} - theta(i)),
// which preserves the simplex exactly. If a component falls below the
// positivity floor it is clamped and the vector renormalized; *clamped (when
// non-null) reports that event.
theta_estimate sa_update(theta_estimate theta, int j_tilde, double omega, double zeta,
                         bool* clamped = nullptr);

// Regularized variant with prior weight rho >= 0:
//   theta'(i) = theta(i) + omega * (theta(j~)^zeta + omega * 1{i >= j~} * rho)
//                        * (1{i = j~} - theta(i)).
// The O(omega^2 rho) simplex drift is projected out by renormalizing; with
// rho == 0 the arithmetic is bit-identical to sa_update.
theta_estimate sa_update_regularized(theta_estimate theta, int j_tilde, double omega,
                                     double zeta, double rho, bool* clamped = nullptr);

// Random field H(theta, j~) with H_i = theta(j~)^zeta * (1{i = j~} - theta(i));
// sa_update equals theta + omega * H componentwise. Sums to zero on the
// simplex.
std::vector<double> random_field(const theta_estimate& theta, int j_tilde, double zeta);

// FNV-1a 64-bit hash of the component bytes; identifies theta snapshots in
// trajectory records.
std::uint64_t theta_hash(const theta_estimate& theta);

}  // namespace csgld
