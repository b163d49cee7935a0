#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "csgld/rng.hpp"

namespace csgld {

enum class target_kind { gaussian_mixture, subsampled_regression };

// Static description of a sampling problem. temperature tau scales the energy
// (pi(x) proportional to exp(-U(x)/tau)); gradient_noise_sigma is the
// STANDARD DEVIATION of the optional Gaussian noise injected into analytic
// gradients. data_seed pins the synthetic dataset of the regression target.
struct target_spec {
    target_kind kind = target_kind::gaussian_mixture;
    int dimension = 1;
    double temperature = 1.0;
    long dataset_size = 1;   // N
    long batch_size = 1;     // n <= N
    double gradient_noise_sigma = 0.0;
    std::uint64_t data_seed = 20200907;
};

// One stochastic gradient evaluation at a point x.
//   grad              : minibatch gradient of U-tilde at x (length d)
//   energy_stochastic : minibatch energy U-tilde(x)
//   energy_scaled     : (N/n) * U-tilde(x), the unbiased estimate of U(x)
struct gradient_eval {
    std::vector<double> grad;
    double energy_stochastic = 0.0;
    double energy_scaled = 0.0;
};

class target {
  public:
    explicit target(target_spec spec) : spec_(spec) {}
    virtual ~target() = default;

    const target_spec& spec() const { return spec_; }
    int dimension() const { return spec_.dimension; }

    // Full-data (or analytic) energy U(x).
    virtual double energy(std::span<const double> x) const = 0;

    // Exact full-data gradient of U at x, written into out.
    virtual void gradient(std::span<const double> x, std::span<double> out) const = 0;

    // Minibatch gradient and energy with E[(N/n) U-tilde(x)] = U(x) and
    // E[(N/n) grad-tilde(x)] = grad U(x). Pure given the rng handle; safe to
    // call concurrently from independent chains with independent rngs.
    virtual void stochastic_gradient(std::span<const double> x, rng& gen,
                                     gradient_eval& out) const = 0;

    // Upper bound on the pi-mass outside [lo, hi] (1-D targets; used by the
    // quadrature oracle to validate grids). Returns +inf when no bound is
    // known.
    virtual double tail_mass_bound(double lo, double hi) const;

    gradient_eval stochastic_gradient(std::span<const double> x, rng& gen) const {
        gradient_eval e;
        stochastic_gradient(x, gen, e);
        return e;
    }

  protected:
    target_spec spec_;
};

// Two-component Gaussian mixture pi(x) = 0.4 N(-6,1) + 0.6 N(4,1) on R,
// U(x) = -tau * log pi(x) evaluated with log-sum-exp. Gradients are analytic;
// stochastic_gradient adds N(0, sigma^2) noise per coordinate and reports the
// exact energy (N = n = 1).
class gaussian_mixture_target final : public target {
  public:
    explicit gaussian_mixture_target(const target_spec& spec);

    double energy(std::span<const double> x) const override;
    void gradient(std::span<const double> x, std::span<double> out) const override;
    void stochastic_gradient(std::span<const double> x, rng& gen,
                             gradient_eval& out) const override;
    double tail_mass_bound(double lo, double hi) const override;
};

// Synthetic Bayesian linear regression: y_i = w.z_i + e_i with z_i ~ N(0, I),
// e_i ~ N(0, 1), Gaussian prior N(0, 100 I) on the coefficients. The full
// energy is the negative log posterior
//   U(x) = sum_i (y_i - x.z_i)^2 / 2 + |x|^2 / 200.
// A minibatch B contributes U-tilde(x) = sum_{i in B} loss_i + (n/N) * prior,
// so (N/n) U-tilde is exactly unbiased for U, and likewise for gradients.
class regression_target final : public target {
  public:
    explicit regression_target(const target_spec& spec);

    double energy(std::span<const double> x) const override;
    void gradient(std::span<const double> x, std::span<double> out) const override;
    void stochastic_gradient(std::span<const double> x, rng& gen,
                             gradient_eval& out) const override;

    // Deterministic evaluation on an explicit index set (exposed so tests can
    // enumerate every minibatch).
    void batch_eval(std::span<const double> x, std::span<const std::uint64_t> batch,
                    gradient_eval& out) const;

    std::span<const double> true_coefficients() const { return w_true_; }

  private:
    std::vector<double> z_;  // row-major N x d design matrix
    std::vector<double> y_;
    std::vector<double> w_true_;
};

// Validates the spec and builds the matching target.
std::unique_ptr<target> make_target(const target_spec& spec);

}  // namespace csgld
