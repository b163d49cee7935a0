#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>

namespace csgld {

// Identifier of the generator scheme, echoed into run outputs. The stream is
// fully pinned: mt19937_64 (sequence fixed by the C++ standard) drives an
// explicit Box-Muller transform that always consumes exactly two 64-bit draws
// per normal variate (no cached spare), and a Lemire multiply-shift rejection
// scheme for bounded integers. Two runs with the same seed therefore produce
// identical draw sequences on any conforming platform.
inline constexpr const char* kRngId = "mt19937_64-bm";

class rng {
  public:
    explicit rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller: z = sqrt(-2 ln u1) * cos(2 pi u2),
    // u1 in (0, 1] so the log is finite. Consumes exactly two draws.
    double gauss() {
        const double u1 = static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
        const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    // Uniform integer in [0, bound), exact (rejection, no modulo bias).
    std::uint64_t uniform_below(std::uint64_t bound) {
        unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * bound;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (lo < threshold) {
                m = static_cast<unsigned __int128>(engine_()) * bound;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    // Writes a uniform sample of `out.size()` distinct indices from
    // [0, population) into `out`, by partial Fisher-Yates over a scratch
    // index table. Order of draws is deterministic.
    void sample_without_replacement(std::uint64_t population, std::span<std::uint64_t> out);

  private:
    std::mt19937_64 engine_;
};

}  // namespace csgld
