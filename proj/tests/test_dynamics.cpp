#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "csgld/dynamics.hpp"
#include "csgld/errors.hpp"

using namespace csgld;

namespace {

target_spec mixture_spec(double sigma = 0.1) {
    target_spec s;
    s.kind = target_kind::gaussian_mixture;
    s.dimension = 1;
    s.dataset_size = 1;
    s.batch_size = 1;
    s.gradient_noise_sigma = sigma;
    return s;
}

kernel_config kernel_of(kernel_kind kind, double epsilon = 0.1, double zeta = 0.75) {
    kernel_config c;
    c.kind = kind;
    c.epsilon = epsilon;
    c.zeta = zeta;
    return c;
}

chain_state state_at(double x0) {
    chain_state s;
    s.x = {x0};
    return s;
}

// Full per-step trajectory of x under a fixed seed.
std::vector<double> trajectory(kernel_kind kind, const theta_estimate& theta0,
                               double schedule_a, long steps, std::uint64_t seed) {
    auto t = make_target(mixture_spec());
    const energy_partition p{10, 2.0, 1.0};
    chain_options opts;
    opts.steps = steps;
    opts.thinning = 1;
    opts.schedule = {schedule_a, 0.6, 100.0};
    std::vector<double> xs;
    rng gen(seed);
    run_chain(*t, p, kernel_of(kind), state_at(4.0), theta0, opts, gen,
              [&](const chain_record& r) { xs.push_back(r.x_first); });
    return xs;
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("kernel kind predicates") {
    CHECK_FALSE(uses_momentum(kernel_kind::sgld));
    CHECK_FALSE(uses_momentum(kernel_kind::csgld));
    CHECK_FALSE(uses_momentum(kernel_kind::ksgld));
    CHECK(uses_momentum(kernel_kind::sghmc));
    CHECK(uses_momentum(kernel_kind::csghmc));

    CHECK_FALSE(uses_multiplier(kernel_kind::sgld));
    CHECK(uses_multiplier(kernel_kind::csgld));
    CHECK(uses_multiplier(kernel_kind::ksgld));
    CHECK_FALSE(uses_multiplier(kernel_kind::sghmc));
    CHECK(uses_multiplier(kernel_kind::csghmc));

    CHECK_FALSE(updates_theta(kernel_kind::sgld));
    CHECK(updates_theta(kernel_kind::csgld));
    CHECK_FALSE(updates_theta(kernel_kind::ksgld));
    CHECK_FALSE(updates_theta(kernel_kind::sghmc));
    CHECK(updates_theta(kernel_kind::csghmc));
}

TEST_CASE("kernel config validation") {
    CHECK_NOTHROW(validate(kernel_of(kernel_kind::csgld)));
    auto bad = kernel_of(kernel_kind::csgld);
    bad.epsilon = 0.0;
    CHECK_THROWS_AS(validate(bad), invalid_input);
    bad = kernel_of(kernel_kind::csgld);
    bad.zeta = -1.0;
    CHECK_THROWS_AS(validate(bad), invalid_input);
    bad = kernel_of(kernel_kind::csgld);
    bad.tau = -0.5;
    CHECK_THROWS_AS(validate(bad), invalid_input);
    bad = kernel_of(kernel_kind::sghmc);
    bad.momentum = 1.0;
    CHECK_THROWS_AS(validate(bad), invalid_input);
    bad = kernel_of(kernel_kind::csgld);
    bad.epsilon_decay = 0.0;
    CHECK_THROWS_AS(validate(bad), invalid_input);
    bad = kernel_of(kernel_kind::csgld);
    bad.decay_every = -1;
    CHECK_THROWS_AS(validate(bad), invalid_input);
}

TEST_CASE("contour kernel with frozen uniform theta is bit-identical to plain langevin") {
    const auto uni = theta_estimate::uniform(10);
    const auto a = trajectory(kernel_kind::csgld, uni, 0.0, 400, 51);
    const auto b = trajectory(kernel_kind::sgld, uni, 1.0, 400, 51);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) REQUIRE(a[i] == b[i]);
}

TEST_CASE("adaptive kernel with a frozen schedule is bit-identical to the known-theta kernel") {
    std::vector<double> v{0.5, 0.2, 0.1, 0.05, 0.05, 0.025, 0.025, 0.02, 0.02, 0.01};
    const theta_estimate theta0(v);
    const auto a = trajectory(kernel_kind::csgld, theta0, 0.0, 400, 52);
    const auto b = trajectory(kernel_kind::ksgld, theta0, 1.0, 400, 52);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) REQUIRE(a[i] == b[i]);
}

TEST_CASE("momentum contour kernel with frozen uniform theta matches plain momentum kernel") {
    const auto uni = theta_estimate::uniform(10);
    const auto a = trajectory(kernel_kind::csghmc, uni, 0.0, 400, 53);
    const auto b = trajectory(kernel_kind::sghmc, uni, 1.0, 400, 53);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) REQUIRE(a[i] == b[i]);
}

TEST_CASE("step decay ladder matches manual per-step epsilon") {
    auto t = make_target(mixture_spec());
    const energy_partition p{5, 2.0, 1.0};
    const auto theta = theta_estimate::uniform(5);

    auto decayed = kernel_of(kernel_kind::sgld);
    decayed.epsilon_decay = 0.5;
    decayed.decay_every = 3;

    rng ga(9), gb(9);
    chain_state sa = state_at(4.0), sb = state_at(4.0);
    gradient_eval ea = t->stochastic_gradient(sa.x, ga);
    gradient_eval eb = t->stochastic_gradient(sb.x, gb);
    for (long k = 1; k <= 12; ++k) {
        kernel_step(sa, ea, *t, p, theta, decayed, ga);
        auto manual = kernel_of(kernel_kind::sgld);
        manual.epsilon = 0.1 * std::pow(0.5, static_cast<double>((k - 1) / 3));
        kernel_step(sb, eb, *t, p, theta, manual, gb);
        REQUIRE(sa.x[0] == sb.x[0]);
    }
}

TEST_CASE("kernel step refreshes the gradient at the new point") {
    auto t = make_target(mixture_spec(0.0));  // noiseless: eval fields are exact
    const energy_partition p{10, 2.0, 1.0};
    const auto theta = theta_estimate::uniform(10);
    rng gen(4);
    chain_state s = state_at(4.0);
    gradient_eval eval = t->stochastic_gradient(s.x, gen);
    const int j_before = stochastic_index(p, eval);

    const auto res = kernel_step(s, eval, *t, p, theta, kernel_of(kernel_kind::csgld), gen);
    CHECK(res.j_used == j_before);
    CHECK(s.k == 1);
    CHECK(eval.energy_scaled == t->energy(s.x));
    std::vector<double> g(1);
    t->gradient(s.x, g);
    CHECK(eval.grad[0] == g[0]);
    CHECK(res.j_next == index_of(p, eval.energy_scaled));
    CHECK(res.multiplier == 1.0);  // uniform theta
}

TEST_CASE("divergence is thrown by the kernel and reported by the driver") {
    auto t = make_target(mixture_spec());
    const energy_partition p{5, 2.0, 1.0};
    const auto theta = theta_estimate::uniform(5);
    auto wild = kernel_of(kernel_kind::sgld, 1e305);

    rng gen(6);
    chain_state s = state_at(4.0);
    gradient_eval eval = t->stochastic_gradient(s.x, gen);
    CHECK_THROWS_AS((void)kernel_step(s, eval, *t, p, theta, wild, gen), divergence_error);

    chain_options opts;
    opts.steps = 100;
    rng gen2(6);
    const auto out = run_chain(*t, p, wild, state_at(4.0), theta, opts, gen2);
    CHECK(out.diverged);
    CHECK(out.divergence_step == 1);
}

TEST_CASE("driver validates its inputs") {
    auto t = make_target(mixture_spec());
    const energy_partition p{5, 2.0, 1.0};
    chain_options opts;
    opts.steps = 10;
    rng gen(1);
    CHECK_THROWS_AS((void)run_chain(*t, p, kernel_of(kernel_kind::csgld), state_at(4.0),
                                    theta_estimate::uniform(4), opts, gen),
                    invalid_input);
    CHECK_THROWS_AS((void)run_chain(*t, p, kernel_of(kernel_kind::csgld),
                                    chain_state{{1.0, 2.0}, {}, 0},
                                    theta_estimate::uniform(5), opts, gen),
                    invalid_input);
    opts.thinning = 0;
    CHECK_THROWS_AS((void)run_chain(*t, p, kernel_of(kernel_kind::csgld), state_at(4.0),
                                    theta_estimate::uniform(5), opts, gen),
                    invalid_input);
    opts.thinning = 1;
    opts.steps = -1;
    CHECK_THROWS_AS((void)run_chain(*t, p, kernel_of(kernel_kind::csgld), state_at(4.0),
                                    theta_estimate::uniform(5), opts, gen),
                    invalid_input);
    opts.steps = 10;
    opts.theta_stride = -2;
    CHECK_THROWS_AS((void)run_chain(*t, p, kernel_of(kernel_kind::csgld), state_at(4.0),
                                    theta_estimate::uniform(5), opts, gen),
                    invalid_input);
}

TEST_CASE("records carry the post-update importance weight") {
    auto t = make_target(mixture_spec());
    const energy_partition p{10, 2.0, 1.0};
    chain_options opts;
    opts.steps = 500;
    opts.thinning = 7;
    opts.schedule = {1.0, 0.6, 100.0};
    rng gen(33);
    std::vector<chain_record> recs;
    const auto out = run_chain(*t, p, kernel_of(kernel_kind::csgld), state_at(4.0),
                               theta_estimate::uniform(10), opts, gen,
                               [&](const chain_record& r) { recs.push_back(r); });
    REQUIRE_FALSE(out.diverged);
    REQUIRE(recs.size() == 500u / 7u);
    for (const auto& r : recs) {
        REQUIRE(r.step % 7 == 0);
        REQUIRE(r.importance_weight == std::pow(r.theta_j, 0.75));
        REQUIRE(std::isfinite(r.weighted_estimate));
        REQUIRE(r.x_norm == doctest::Approx(std::abs(r.x_first)).epsilon(1e-12));
        REQUIRE(r.j_tilde >= 1);
        REQUIRE(r.j_tilde <= 10);
    }
    long visits = 0;
    for (long c : out.visit_counts) visits += c;
    CHECK(visits == 500);
    CHECK(out.plain.count() == 500);
    CHECK(out.weighted.count() == 500);
    CHECK(out.min_multiplier <= 1.0);
}

TEST_CASE("estimator start discards the burn-in prefix") {
    auto t = make_target(mixture_spec());
    const energy_partition p{10, 2.0, 1.0};
    chain_options opts;
    opts.steps = 300;
    opts.estimator_start = 100;
    rng gen(34);
    const auto out = run_chain(*t, p, kernel_of(kernel_kind::csgld), state_at(4.0),
                               theta_estimate::uniform(10), opts, gen);
    CHECK(out.plain.count() == 200);
    long visits = 0;
    for (long c : out.visit_counts) visits += c;
    CHECK(visits == 200);
}

TEST_CASE("theta snapshots stream at the configured stride") {
    auto t = make_target(mixture_spec());
    const energy_partition p{10, 2.0, 1.0};
    chain_options opts;
    opts.steps = 25;
    opts.theta_stride = 10;
    opts.schedule = {1.0, 0.6, 100.0};
    rng gen(35);
    std::vector<long> at;
    run_chain(*t, p, kernel_of(kernel_kind::csgld), state_at(4.0),
              theta_estimate::uniform(10), opts, gen, {},
              [&](long k, const theta_estimate& th) {
                  at.push_back(k);
                  REQUIRE(th.size() == 10);
                  REQUIRE(std::abs(th.sum() - 1.0) < 1e-9);
              });
    REQUIRE(at == std::vector<long>{10, 20, 25});
}

TEST_CASE("crossing detection") {
    auto t = make_target(mixture_spec());
    const energy_partition p{10, 2.0, 1.0};
    chain_options opts;
    opts.steps = 200;
    rng gen(36);
    const auto silent = run_chain(*t, p, kernel_of(kernel_kind::sgld), state_at(4.0),
                                  theta_estimate::uniform(10), opts, gen);
    CHECK(silent.first_crossing_step == -1);

    opts.crossing_threshold = 3.9;
    rng gen2(36);
    const auto tracked = run_chain(*t, p, kernel_of(kernel_kind::sgld), state_at(4.0),
                                   theta_estimate::uniform(10), opts, gen2);
    CHECK(tracked.first_crossing_step >= 1);
}

TEST_CASE("regularized theta path stays on the simplex") {
    auto t = make_target(mixture_spec());
    const energy_partition p{10, 2.0, 1.0};
    chain_options opts;
    opts.steps = 2000;
    opts.schedule = {1.0, 0.6, 100.0};
    opts.rho = 5.0;
    rng gen(37);
    const auto out = run_chain(*t, p, kernel_of(kernel_kind::csgld), state_at(4.0),
                               theta_estimate::uniform(10), opts, gen);
    REQUIRE_FALSE(out.diverged);
    CHECK(std::abs(out.theta.sum() - 1.0) < 1e-9);
}

TEST_CASE("plain langevin samples the starting well") {
    auto t = make_target(mixture_spec());
    const energy_partition p{10, 2.0, 1.0};
    chain_options opts;
    opts.steps = 50000;
    opts.estimator_start = 5000;
    rng gen(38);
    const auto out = run_chain(*t, p, kernel_of(kernel_kind::sgld), state_at(4.0),
                               theta_estimate::uniform(10), opts, gen);
    REQUIRE_FALSE(out.diverged);
    CHECK(std::abs(out.plain.estimate() - 4.0) < 0.5);
}

TEST_CASE("momentum contour kernel mixes and learns the region weights") {
    auto t = make_target(mixture_spec());
    const energy_partition p{10, 2.0, 1.0};
    chain_options opts;
    opts.steps = 200000;
    opts.estimator_start = 20000;
    opts.schedule = {1.0, 0.6, 100.0};
    opts.crossing_threshold = -1.0;
    auto cfg = kernel_of(kernel_kind::csghmc, 0.05);
    cfg.momentum = 0.9;
    rng gen(39);
    const auto out = run_chain(*t, p, cfg, state_at(4.0), theta_estimate::uniform(10),
                               opts, gen);
    REQUIRE_FALSE(out.diverged);
    CHECK(out.first_crossing_step >= 1);        // reached the other well
    CHECK(out.theta.value(1) > 0.4);            // bulk of mass in the lowest band
    CHECK(out.theta.value(1) < 0.9999);
    CHECK(out.min_multiplier < 0.0);            // bounce regime was exercised
    int populated = 0;
    for (long c : out.visit_counts) populated += c > 0;
    CHECK(populated >= 6);
}

}
