#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "csgld/errors.hpp"
#include "csgld/partition.hpp"
#include "csgld/rng.hpp"
#include "csgld/theta.hpp"

using namespace csgld;

namespace {

const energy_partition kP3{3, 1.0, 1.0};  // boundaries at 1, 2

gradient_eval eval_at(double scaled_energy) {
    gradient_eval e;
    e.energy_scaled = scaled_energy;
    return e;
}

}  // namespace

TEST_SUITE("partition") {

TEST_CASE("validation") {
    CHECK_NOTHROW(validate(energy_partition{1, 0.0, 1.0}));
    CHECK_NOTHROW(validate(energy_partition{50, 2.0, 1.0}));
    CHECK_THROWS_AS(validate(energy_partition{0, 0.0, 1.0}), invalid_input);
    CHECK_THROWS_AS(validate(energy_partition{5, 0.0, 0.0}), invalid_input);
    CHECK_THROWS_AS(validate(energy_partition{5, 0.0, -1.0}), invalid_input);
    CHECK_THROWS_AS(validate(energy_partition{5, std::numeric_limits<double>::infinity(), 1.0}),
                    invalid_input);
}

TEST_CASE("boundaries are uniformly spaced from u1") {
    const energy_partition p{6, 2.5, 0.5};
    CHECK(p.boundary(1) == 2.5);
    CHECK(p.boundary(2) == 3.0);
    CHECK(p.boundary(5) == 4.5);
}

TEST_CASE("index_of uses left-open right-closed bands") {
    CHECK(index_of(kP3, -100.0) == 1);
    CHECK(index_of(kP3, 1.0) == 1);          // boundary belongs below
    CHECK(index_of(kP3, 1.0 + 1e-12) == 2);
    CHECK(index_of(kP3, 2.0) == 2);
    CHECK(index_of(kP3, 2.0 + 1e-12) == 3);
    CHECK(index_of(kP3, 1e9) == 3);          // clamps at the top band
    CHECK_THROWS_AS((void)index_of(kP3, std::numeric_limits<double>::quiet_NaN()),
                    invalid_input);
}

TEST_CASE("stochastic index bins the scaled minibatch energy") {
    CHECK(stochastic_index(kP3, eval_at(0.3)) == 1);
    CHECK(stochastic_index(kP3, eval_at(1.7)) == 2);
    CHECK(stochastic_index(kP3, eval_at(9.0)) == 3);
}

TEST_CASE("single-region partition degenerates cleanly") {
    const energy_partition p{1, 0.0, 1.0};
    const auto theta = theta_estimate::uniform(1);
    CHECK(index_of(p, -5.0) == 1);
    CHECK(index_of(p, 5.0) == 1);
    CHECK(psi(p, theta, -5.0) == theta.value(1));
    CHECK(psi(p, theta, 5.0) == theta.value(1));
    CHECK(grad_multiplier(p, theta, 1, 0.75, 1.0) == 1.0);
}

TEST_CASE("psi interpolates log-linearly inside a band") {
    const auto theta = theta_estimate(std::vector<double>{0.5, 0.25, 0.25});
    // mid band 2: geometric mean of the bracketing components
    CHECK(std::abs(psi(kP3, theta, 1.5) - 0.35355339059327373) < 1e-15);
    // anchors: the band's right edge hits theta(i) exactly
    CHECK(psi(kP3, theta, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(psi(kP3, theta, 2.0) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("psi is flat below u1 and capped one bandwidth past the last edge") {
    const auto theta = theta_estimate(std::vector<double>{0.5, 0.25, 0.25});
    CHECK(psi(kP3, theta, -10.0) == psi(kP3, theta, 1.0));
    CHECK(psi(kP3, theta, 3.0) == doctest::Approx(theta.value(3)).epsilon(1e-14));
    CHECK(psi(kP3, theta, 50.0) == psi(kP3, theta, 3.0));
}

TEST_CASE("psi is continuous across band edges") {
    const energy_partition p{8, 0.5, 0.7};
    rng gen(21);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> v(8);
        double s = 0;
        for (auto& c : v) s += (c = 0.05 + gen.uniform());
        for (auto& c : v) c /= s;
        const theta_estimate theta(v);
        for (int i = 1; i <= 7; ++i) {
            const double u = p.boundary(i);
            const double lo = psi(p, theta, u - 1e-10);
            const double hi = psi(p, theta, u + 1e-10);
            REQUIRE(std::abs(lo - hi) < 1e-8 * hi);
        }
    }
}

TEST_CASE("psi stays between the bracketing components") {
    const energy_partition p{6, 1.0, 1.0};
    rng gen(33);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> v(6);
        double s = 0;
        for (auto& c : v) s += (c = 0.01 + gen.uniform());
        for (auto& c : v) c /= s;
        const theta_estimate theta(v);
        for (int i = 2; i <= 5; ++i) {
            const double u = p.boundary(i - 1) + gen.uniform();  // inside band i
            const double a = theta.value(i - 1), b = theta.value(i);
            const double lo = std::min(a, b), hi = std::max(a, b);
            const double w = psi(p, theta, u);
            REQUIRE(w >= lo - 1e-15);
            REQUIRE(w <= hi + 1e-15);
        }
    }
}

TEST_CASE("grad multiplier closed form and sign regimes") {
    const auto up = theta_estimate(std::vector<double>{0.25, 0.5, 0.25});
    // rising theta doubles across the band edge: 1 + zeta tau log 2
    CHECK(std::abs(grad_multiplier(kP3, up, 2, 0.75, 1.0) - 1.5198603854199589) < 1e-15);

    const auto down = theta_estimate(std::vector<double>{0.9, 0.05, 0.05});
    const double m2 = grad_multiplier(kP3, down, 2, 0.75, 1.0);
    CHECK(m2 == doctest::Approx(1.0 + 0.75 * (std::log(0.05) - std::log(0.9))).epsilon(1e-14));
    CHECK(m2 < 0.0);  // bounce regime
}

TEST_CASE("grad multiplier is one at the bottom band and under uniform theta") {
    const auto theta = theta_estimate(std::vector<double>{0.7, 0.2, 0.1});
    CHECK(grad_multiplier(kP3, theta, 1, 0.75, 1.0) == 1.0);
    const auto uni = theta_estimate::uniform(3);
    for (int j = 1; j <= 3; ++j) CHECK(grad_multiplier(kP3, uni, j, 0.75, 1.0) == 1.0);
}

TEST_CASE("grad multiplier scales with zeta, tau and bandwidth") {
    const energy_partition wide{3, 1.0, 2.0};
    const auto theta = theta_estimate(std::vector<double>{0.25, 0.5, 0.25});
    const double base = grad_multiplier(kP3, theta, 2, 0.75, 1.0) - 1.0;
    CHECK(grad_multiplier(kP3, theta, 2, 1.5, 1.0) - 1.0 == doctest::Approx(2 * base));
    CHECK(grad_multiplier(kP3, theta, 2, 0.75, 2.0) - 1.0 == doctest::Approx(2 * base));
    CHECK(grad_multiplier(wide, theta, 2, 0.75, 1.0) - 1.0 == doctest::Approx(base / 2));
    CHECK(grad_multiplier(kP3, theta, 2, 0.0, 1.0) == 1.0);
}

}
