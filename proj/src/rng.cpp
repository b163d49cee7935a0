#include "csgld/rng.hpp"

#include <numeric>
#include <utility>
#include <vector>

#include "csgld/errors.hpp"

namespace csgld {

void rng::sample_without_replacement(std::uint64_t population, std::span<std::uint64_t> out) {
    if (out.size() > population)
        throw invalid_input("sample size exceeds population");
    // Scratch is thread_local so concurrent chains never share state.
    thread_local std::vector<std::uint64_t> scratch;
    scratch.resize(population);
    std::iota(scratch.begin(), scratch.end(), std::uint64_t{0});
    for (std::size_t i = 0; i < out.size(); ++i) {
        const std::uint64_t j = i + uniform_below(population - i);
        std::swap(scratch[i], scratch[j]);
        out[i] = scratch[i];
    }
}

}  // namespace csgld
