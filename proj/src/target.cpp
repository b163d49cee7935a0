#include "csgld/target.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "csgld/errors.hpp"

namespace csgld {
namespace {

constexpr double kMixW1 = 0.4, kMixMu1 = -6.0;
constexpr double kMixW2 = 0.6, kMixMu2 = 4.0;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log sqrt(2 pi)
constexpr double kRegressionNoise = 1.0;                // observation std
constexpr double kRegressionPriorVar = 100.0;

void check_point(std::span<const double> x, int d) {
    if (static_cast<int>(x.size()) != d)
        throw invalid_input("point dimension mismatch");
    for (double v : x)
        if (!std::isfinite(v)) throw invalid_input("non-finite point coordinate");
}

// Upper tail P(Z > t) of a standard normal.
double normal_upper_tail(double t) { return 0.5 * std::erfc(t / std::numbers::sqrt2); }

}  // namespace

double target::tail_mass_bound(double, double) const {
    return std::numeric_limits<double>::infinity();
}

gaussian_mixture_target::gaussian_mixture_target(const target_spec& spec) : target(spec) {
    if (spec.dimension != 1)
        throw invalid_input("gaussian mixture target is one-dimensional");
    if (spec.dataset_size != 1 || spec.batch_size != 1)
        throw invalid_input("gaussian mixture target has no dataset (N = n = 1)");
}

double gaussian_mixture_target::energy(std::span<const double> x) const {
    check_point(x, 1);
    // U = -tau * logsumexp(log w_c - (x - mu_c)^2 / 2 - log sqrt(2 pi))
    const double a1 = std::log(kMixW1) - 0.5 * (x[0] - kMixMu1) * (x[0] - kMixMu1);
    const double a2 = std::log(kMixW2) - 0.5 * (x[0] - kMixMu2) * (x[0] - kMixMu2);
    const double hi = std::max(a1, a2);
    const double lse = hi + std::log(std::exp(a1 - hi) + std::exp(a2 - hi)) - kLogSqrt2Pi;
    return -spec_.temperature * lse;
}

void gaussian_mixture_target::gradient(std::span<const double> x, std::span<double> out) const {
    check_point(x, 1);
    if (out.size() != 1) throw invalid_input("gradient buffer dimension mismatch");
    // dU/dx = tau * (w1(x) (x - mu1) + w2(x) (x - mu2)) with softmax weights.
    const double a1 = std::log(kMixW1) - 0.5 * (x[0] - kMixMu1) * (x[0] - kMixMu1);
    const double a2 = std::log(kMixW2) - 0.5 * (x[0] - kMixMu2) * (x[0] - kMixMu2);
    const double hi = std::max(a1, a2);
    const double e1 = std::exp(a1 - hi), e2 = std::exp(a2 - hi);
    const double s = e1 + e2;
    out[0] = spec_.temperature *
             ((e1 / s) * (x[0] - kMixMu1) + (e2 / s) * (x[0] - kMixMu2));
}

void gaussian_mixture_target::stochastic_gradient(std::span<const double> x, rng& gen,
                                                  gradient_eval& out) const {
    out.grad.resize(1);
    gradient(x, out.grad);
    if (spec_.gradient_noise_sigma > 0.0)
        out.grad[0] += spec_.gradient_noise_sigma * gen.gauss();
    out.energy_stochastic = energy(x);
    out.energy_scaled = out.energy_stochastic;  // N = n = 1
}

double gaussian_mixture_target::tail_mass_bound(double lo, double hi) const {
    return kMixW1 * (normal_upper_tail(kMixMu1 - lo) + normal_upper_tail(hi - kMixMu1)) +
           kMixW2 * (normal_upper_tail(kMixMu2 - lo) + normal_upper_tail(hi - kMixMu2));
}

regression_target::regression_target(const target_spec& spec) : target(spec) {
    const long n_data = spec.dataset_size;
    const int d = spec.dimension;
    z_.resize(static_cast<std::size_t>(n_data) * d);
    y_.resize(n_data);
    w_true_.resize(d);
    rng gen(spec.data_seed);
    for (int j = 0; j < d; ++j) w_true_[j] = gen.gauss();
    for (long i = 0; i < n_data; ++i) {
        double dot = 0.0;
        for (int j = 0; j < d; ++j) {
            const double z = gen.gauss();
            z_[static_cast<std::size_t>(i) * d + j] = z;
            dot += w_true_[j] * z;
        }
        y_[i] = dot + kRegressionNoise * gen.gauss();
    }
}

double regression_target::energy(std::span<const double> x) const {
    check_point(x, spec_.dimension);
    const int d = spec_.dimension;
    double loss = 0.0;
    for (long i = 0; i < spec_.dataset_size; ++i) {
        double r = -y_[i];
        for (int j = 0; j < d; ++j) r += x[j] * z_[static_cast<std::size_t>(i) * d + j];
        loss += 0.5 * r * r / (kRegressionNoise * kRegressionNoise);
    }
    double prior = 0.0;
    for (int j = 0; j < d; ++j) prior += x[j] * x[j];
    return loss + 0.5 * prior / kRegressionPriorVar;
}

void regression_target::gradient(std::span<const double> x, std::span<double> out) const {
    check_point(x, spec_.dimension);
    const int d = spec_.dimension;
    if (static_cast<int>(out.size()) != d)
        throw invalid_input("gradient buffer dimension mismatch");
    std::fill(out.begin(), out.end(), 0.0);
    for (long i = 0; i < spec_.dataset_size; ++i) {
        double r = -y_[i];
        const double* zi = &z_[static_cast<std::size_t>(i) * d];
        for (int j = 0; j < d; ++j) r += x[j] * zi[j];
        for (int j = 0; j < d; ++j) out[j] += r * zi[j] / (kRegressionNoise * kRegressionNoise);
    }
    for (int j = 0; j < d; ++j) out[j] += x[j] / kRegressionPriorVar;
}

void regression_target::batch_eval(std::span<const double> x,
                                   std::span<const std::uint64_t> batch,
                                   gradient_eval& out) const {
    check_point(x, spec_.dimension);
    const int d = spec_.dimension;
    const double prior_frac =
        static_cast<double>(batch.size()) / static_cast<double>(spec_.dataset_size);
    out.grad.assign(d, 0.0);
    double loss = 0.0;
    for (std::uint64_t i : batch) {
        double r = -y_[i];
        const double* zi = &z_[static_cast<std::size_t>(i) * d];
        for (int j = 0; j < d; ++j) r += x[j] * zi[j];
        loss += 0.5 * r * r / (kRegressionNoise * kRegressionNoise);
        for (int j = 0; j < d; ++j)
            out.grad[j] += r * zi[j] / (kRegressionNoise * kRegressionNoise);
    }
    double prior = 0.0;
    for (int j = 0; j < d; ++j) {
        prior += x[j] * x[j];
        out.grad[j] += prior_frac * x[j] / kRegressionPriorVar;
    }
    out.energy_stochastic = loss + prior_frac * 0.5 * prior / kRegressionPriorVar;
    out.energy_scaled = out.energy_stochastic *
                        (static_cast<double>(spec_.dataset_size) /
                         static_cast<double>(batch.size()));
}

void regression_target::stochastic_gradient(std::span<const double> x, rng& gen,
                                            gradient_eval& out) const {
    thread_local std::vector<std::uint64_t> batch;
    batch.resize(spec_.batch_size);
    gen.sample_without_replacement(spec_.dataset_size, batch);
    batch_eval(x, batch, out);
    if (spec_.gradient_noise_sigma > 0.0)
        for (double& g : out.grad) g += spec_.gradient_noise_sigma * gen.gauss();
}

std::unique_ptr<target> make_target(const target_spec& spec) {
    if (spec.dimension < 1) throw invalid_input("dimension must be >= 1");
    if (!(spec.temperature > 0.0) || !std::isfinite(spec.temperature))
        throw invalid_input("temperature must be positive");
    if (spec.dataset_size < 1) throw invalid_input("dataset size must be >= 1");
    if (spec.batch_size < 1 || spec.batch_size > spec.dataset_size)
        throw invalid_input("batch size must satisfy 1 <= n <= N");
    if (spec.gradient_noise_sigma < 0.0 || !std::isfinite(spec.gradient_noise_sigma))
        throw invalid_input("gradient noise sigma must be >= 0");
    switch (spec.kind) {
        case target_kind::gaussian_mixture:
            return std::make_unique<gaussian_mixture_target>(spec);
        case target_kind::subsampled_regression:
            return std::make_unique<regression_target>(spec);
    }
    throw invalid_input("unknown target kind");
}

}  // namespace csgld
