#include "csgld/dynamics.hpp"

#include <cmath>

#include "csgld/errors.hpp"

namespace csgld {

bool uses_momentum(kernel_kind k) {
    return k == kernel_kind::sghmc || k == kernel_kind::csghmc;
}

bool uses_multiplier(kernel_kind k) {
    return k == kernel_kind::csgld || k == kernel_kind::ksgld || k == kernel_kind::csghmc;
}

bool updates_theta(kernel_kind k) {
    return k == kernel_kind::csgld || k == kernel_kind::csghmc;
}

void validate(const kernel_config& c) {
    if (!(c.epsilon > 0.0) || !std::isfinite(c.epsilon))
        throw invalid_input("epsilon must be positive");
    if (!(c.zeta >= 0.0) || !std::isfinite(c.zeta)) throw invalid_input("zeta must be >= 0");
    if (!(c.tau >= 0.0) || !std::isfinite(c.tau)) throw invalid_input("tau must be >= 0");
    if (uses_momentum(c.kind) && (c.momentum < 0.0 || c.momentum >= 1.0))
        throw invalid_input("momentum must lie in [0, 1)");
    if (!(c.epsilon_decay > 0.0) || c.epsilon_decay > 1.0)
        throw invalid_input("epsilon decay factor must lie in (0, 1]");
    if (c.decay_every < 0) throw invalid_input("decay interval must be >= 0");
}

namespace {

double epsilon_at(const kernel_config& cfg, long k) {
    if (cfg.decay_every <= 0 || cfg.epsilon_decay == 1.0) return cfg.epsilon;
    return cfg.epsilon * std::pow(cfg.epsilon_decay, static_cast<double>((k - 1) / cfg.decay_every));
}

}  // namespace

step_result kernel_step(chain_state& state, gradient_eval& eval, const target& t,
                        const energy_partition& p, const theta_estimate& theta,
                        const kernel_config& cfg, rng& gen) {
    const int d = t.dimension();
    const long k = state.k + 1;
    const double eps = epsilon_at(cfg, k);
    const double scale = static_cast<double>(t.spec().dataset_size) /
                         static_cast<double>(t.spec().batch_size);

    step_result res;
    res.j_used = stochastic_index(p, eval);
    res.multiplier = uses_multiplier(cfg.kind)
                         ? grad_multiplier(p, theta, res.j_used, cfg.zeta, cfg.tau)
                         : 1.0;

    const double drift = eps * scale * res.multiplier;
    if (uses_momentum(cfg.kind)) {
        if (state.v.empty()) state.v.assign(d, 0.0);
        const double noise = std::sqrt(2.0 * cfg.tau * eps * (1.0 - cfg.momentum));
        for (int i = 0; i < d; ++i) {
            state.v[i] = cfg.momentum * state.v[i] - drift * eval.grad[i] + noise * gen.gauss();
            state.x[i] += state.v[i];
        }
    } else {
        const double noise = std::sqrt(2.0 * cfg.tau * eps);
        for (int i = 0; i < d; ++i)
            state.x[i] += -drift * eval.grad[i] + noise * gen.gauss();
    }
    state.k = k;
    for (double v : state.x)
        if (!std::isfinite(v)) throw divergence_error(k);

    t.stochastic_gradient(state.x, gen, eval);
    if (!std::isfinite(eval.energy_scaled)) throw divergence_error(k);
    res.j_next = stochastic_index(p, eval);
    return res;
}

chain_run_result run_chain(const target& t, const energy_partition& p,
                           const kernel_config& cfg, chain_state state,
                           theta_estimate theta, const chain_options& opts, rng& gen,
                           const std::function<void(const chain_record&)>& sink,
                           const std::function<void(long, const theta_estimate&)>& theta_sink) {
    validate(p);
    validate(cfg);
    validate(opts.schedule);
    if (theta.size() != p.m) throw invalid_input("theta size does not match partition");
    if (static_cast<int>(state.x.size()) != t.dimension())
        throw invalid_input("state dimension does not match target");
    if (opts.steps < 0) throw invalid_input("steps must be >= 0");
    if (opts.thinning < 1) throw invalid_input("thinning must be >= 1");
    if (opts.theta_stride < 0) throw invalid_input("theta stride must be >= 0");

    chain_run_result out;
    out.visit_counts.assign(p.m, 0);
    const bool track_crossing = !std::isnan(opts.crossing_threshold);

    gradient_eval eval = t.stochastic_gradient(state.x, gen);
    const long k_begin = state.k;

    for (long step = 1; step <= opts.steps; ++step) {
        step_result res;
        try {
            res = kernel_step(state, eval, t, p, theta, cfg, gen);
        } catch (const divergence_error& e) {
            out.diverged = true;
            out.divergence_step = e.step;
            break;
        }
        const long k = state.k;

        if (res.multiplier < out.min_multiplier) out.min_multiplier = res.multiplier;
        if (res.multiplier < 0.0) {
            ++out.negative_multiplier_steps;
            if (out.first_negative_multiplier_step < 0) out.first_negative_multiplier_step = k;
        }
        if (track_crossing && out.first_crossing_step < 0 &&
            state.x[0] < opts.crossing_threshold)
            out.first_crossing_step = k;

        if (updates_theta(cfg.kind)) {
            const double omega = step_size(opts.schedule, k);
            bool clamped = false;
            theta = (opts.rho > 0.0)
                        ? sa_update_regularized(std::move(theta), res.j_next, omega,
                                                cfg.zeta, opts.rho, &clamped)
                        : sa_update(std::move(theta), res.j_next, omega, cfg.zeta, &clamped);
            if (clamped) ++out.clamp_events;
        }

        const double weight = std::pow(theta.value(res.j_next), cfg.zeta);
        if (k - k_begin > opts.estimator_start) {
            out.weighted.accumulate(state.x[0], weight);
            out.plain.accumulate(state.x[0], 1.0);
            ++out.visit_counts[res.j_next - 1];
        }

        if (sink && (step % opts.thinning == 0)) {
            chain_record rec;
            rec.step = k;
            rec.x_first = state.x[0];
            double sq = 0.0;
            for (double v : state.x) sq += v * v;
            rec.x_norm = std::sqrt(sq);
            rec.energy_scaled = eval.energy_scaled;
            rec.j_tilde = res.j_next;
            rec.multiplier = res.multiplier;
            rec.theta_j = theta.value(res.j_next);
            rec.theta_snapshot = theta_hash(theta);
            rec.importance_weight = weight;
            rec.weighted_estimate = out.weighted.count() > 0
                                        ? out.weighted.estimate()
                                        : std::numeric_limits<double>::quiet_NaN();
            sink(rec);
        }
        if (theta_sink && opts.theta_stride > 0 &&
            (step % opts.theta_stride == 0 || step == opts.steps))
            theta_sink(k, theta);
    }

    out.state = std::move(state);
    out.theta = std::move(theta);
    return out;
}

}  // namespace csgld
