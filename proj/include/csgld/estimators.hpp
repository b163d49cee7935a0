#pragma once

#include <cstdint>
#include <span>

#include "csgld/theta_fwd.hpp"

namespace csgld {

// Kahan compensated accumulator.
class kahan_sum {
  public:
    void add(double v) {
        const double y = v - c_;
        const double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }
    double compensation() const { return c_; }

  private:
    double s_ = 0.0;
    double c_ = 0.0;
};

// Online dynamic-importance-weighted average: estimate = sum w f / sum w.
// The weight attached to a sample is the theta(j~)^zeta snapshot taken when
// the sample was produced; merging adds field values pairwise (exact
// sum-of-fields reduction, deterministic under a fixed merge order).
class weighted_accumulator {
  public:
    // Requires w > 0 and finite f; throws invalid_input otherwise.
    void accumulate(double f, double w);

    // Mean of accumulated f under weights w. Throws invalid_input when empty.
    double estimate() const;

    double weighted_sum() const { return wf_.value(); }
    double weight_sum() const { return w_.value(); }
    std::int64_t count() const { return count_; }

    void merge(const weighted_accumulator& other);

  private:
    kahan_sum wf_;
    kahan_sum w_;
    std::int64_t count_ = 0;
};

// Unweighted mean of a non-empty sequence (compensated).
double plain_average(std::span<const double> values);

// Normalizer of the weighted-average limit: Z = sum_i theta*(i)^(1 - zeta).
// Equals m at zeta == 1 and 1 at zeta == 0.
double z_theta_star(const theta_estimate& theta_star, double zeta);

}  // namespace csgld
