#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "csgld/estimators.hpp"
#include "csgld/partition.hpp"
#include "csgld/target.hpp"
#include "csgld/theta.hpp"

namespace csgld {

enum class kernel_kind { sgld, csgld, ksgld, sghmc, csghmc };

bool uses_momentum(kernel_kind k);
bool uses_multiplier(kernel_kind k);   // contour-weighted drift
bool updates_theta(kernel_kind k);     // runs the stochastic approximation

// Kernel parameters shared by all five samplers. epsilon may decay
// geometrically every decay_every steps (off when decay_every == 0):
//   epsilon_k = epsilon * epsilon_decay^floor((k-1) / decay_every).
struct kernel_config {
    kernel_kind kind = kernel_kind::csgld;
    double epsilon = 0.1;
    double zeta = 0.75;
    double momentum = 0.9;        // beta, momentum kernels only
    double tau = 1.0;
    double epsilon_decay = 1.0;
    long decay_every = 0;
};

void validate(const kernel_config& c);

// Position (and momentum, for the sghmc family) of one chain. k counts
// completed steps.
struct chain_state {
    std::vector<double> x;
    std::vector<double> v;
    long k = 0;
};

struct step_result {
    int j_used = 0;        // region index the multiplier was evaluated at
    double multiplier = 1.0;
    int j_next = 0;        // region index of the new point (drives sa_update)
};

// One kernel step. Protocol: `eval` must hold the stochastic gradient at
// state.x on entry; on exit the state has advanced one step and `eval` holds
// a fresh stochastic gradient at the new point, so a chain costs exactly one
// gradient evaluation per step. Draw order per step is fixed (move noise,
// then gradient refresh), making kernels with identical drift bit-identical
// under a shared seed. Throws divergence_error if the new state is not
// finite.
//
// Drifts (eps_k at the current step, g = eval.grad, scale = N/n):
//   sgld / sghmc     x' = x - eps scale g + N(0, 2 tau eps)
//   csgld / ksgld    x' = x - eps scale mult(j) g + N(0, 2 tau eps)
//   momentum family  v' = beta v - eps scale [mult] g + N(0, 2 tau eps (1-beta)),
//                    x' = x + v'
// where mult(j) = grad_multiplier(p, theta, j, zeta, tau) at j = J(eval).
step_result kernel_step(chain_state& state, gradient_eval& eval, const target& t,
                        const energy_partition& p, const theta_estimate& theta,
                        const kernel_config& cfg, rng& gen);

// Thinned per-step record emitted by run_chain. weighted_estimate is NaN
// until the estimator has seen a sample.
struct chain_record {
    long step = 0;
    double x_first = 0.0;
    double x_norm = 0.0;
    double energy_scaled = 0.0;
    int j_tilde = 0;
    double multiplier = 1.0;
    double theta_j = 0.0;
    std::uint64_t theta_snapshot = 0;
    double importance_weight = 1.0;
    double weighted_estimate = 0.0;
};

struct chain_options {
    long steps = 0;
    long thinning = 1;
    long estimator_start = 0;              // samples with k > estimator_start count
    step_schedule schedule;                // omega_k for the theta update
    double rho = 0.0;                      // regularized update when > 0
    double crossing_threshold = std::numeric_limits<double>::quiet_NaN();
    long theta_stride = 0;                 // theta_sink cadence; 0 disables
};

struct chain_run_result {
    chain_state state;
    theta_estimate theta = theta_estimate::uniform(1);
    weighted_accumulator weighted;         // f(x) = x[0], importance weighted
    weighted_accumulator plain;            // unit weights
    std::vector<long> visit_counts;        // post-burn-in J visits, size m
    double min_multiplier = 1.0;
    long negative_multiplier_steps = 0;
    long first_negative_multiplier_step = -1;
    long first_crossing_step = -1;         // first k with x[0] < crossing_threshold
    long clamp_events = 0;
    bool diverged = false;
    long divergence_step = -1;
};

// Runs one chain for opts.steps steps from the given state and theta,
// exactly in the order: sample x_k with theta_{k-1} and J(x_{k-1}), then
// update theta_k from J(x_k) with omega_k. The importance weight recorded
// for x_k is theta_k(J(x_k))^zeta, the freshest estimate at production time.
// The sink (may be empty) receives one record per thinning interval.
// Divergence stops the chain and is reported in the result, not thrown.
chain_run_result run_chain(const target& t, const energy_partition& p,
                           const kernel_config& cfg, chain_state state,
                           theta_estimate theta, const chain_options& opts, rng& gen,
                           const std::function<void(const chain_record&)>& sink = {},
                           const std::function<void(long, const theta_estimate&)>& theta_sink = {});

}  // namespace csgld
