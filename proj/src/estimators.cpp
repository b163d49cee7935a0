#include "csgld/estimators.hpp"

#include <cmath>

#include "csgld/errors.hpp"
#include "csgld/theta.hpp"

namespace csgld {

void weighted_accumulator::accumulate(double f, double w) {
    if (!(w > 0.0) || !std::isfinite(w)) throw invalid_input("weight must be positive");
    if (!std::isfinite(f)) throw invalid_input("sample value must be finite");
    wf_.add(w * f);
    w_.add(w);
    ++count_;
}

double weighted_accumulator::estimate() const {
    if (count_ == 0) throw invalid_input("no samples accumulated");
    return wf_.value() / w_.value();
}

void weighted_accumulator::merge(const weighted_accumulator& other) {
    wf_.add(other.wf_.value());
    wf_.add(-other.wf_.compensation());
    w_.add(other.w_.value());
    w_.add(-other.w_.compensation());
    count_ += other.count_;
}

double plain_average(std::span<const double> values) {
    if (values.empty()) throw invalid_input("no samples to average");
    kahan_sum s;
    for (double v : values) s.add(v);
    return s.value() / static_cast<double>(values.size());
}

double z_theta_star(const theta_estimate& theta_star, double zeta) {
    kahan_sum z;
    for (double t : theta_star.values()) z.add(std::pow(t, 1.0 - zeta));
    return z.value();
}

}  // namespace csgld
