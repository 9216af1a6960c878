#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace knowada {

// Engine seeded from SHA-256(seed, salt); mt19937_64 output is fixed by the
// standard, so everything built on it here is platform-stable.
std::mt19937_64 seeded_engine(std::uint64_t seed, std::string_view salt);

// Uniform integer in [0, bound) by rejection on raw engine output.
std::uint64_t uniform_below(std::mt19937_64& engine, std::uint64_t bound);

// k distinct indices from [0, n), uniformly, returned in ascending order.
std::vector<std::size_t> sample_without_replacement(std::mt19937_64& engine, std::size_t n,
                                                    std::size_t k);

}  // namespace knowada
