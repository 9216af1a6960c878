#include "knowada/core/random.hpp"

#include <algorithm>
#include <string>

#include "knowada/core/hashing.hpp"

namespace knowada {

std::mt19937_64 seeded_engine(std::uint64_t seed, std::string_view salt) {
    const auto digest = sha256(std::to_string(seed) + '\n' + std::string(salt));
    std::uint64_t s = 0;
    for (int i = 0; i < 8; ++i) s = (s << 8) | digest[static_cast<std::size_t>(i)];
    return std::mt19937_64(s);
}

std::uint64_t uniform_below(std::mt19937_64& engine, std::uint64_t bound) {
    if (bound <= 1) return 0;
    // Accepted range [0, limit] holds a whole multiple of `bound` values.
    const std::uint64_t max = ~std::uint64_t{0};
    const std::uint64_t limit = max - (max % bound + 1) % bound;
    for (;;) {
        const std::uint64_t x = engine();
        if (x <= limit) return x % bound;
    }
}

std::vector<std::size_t> sample_without_replacement(std::mt19937_64& engine, std::size_t n,
                                                    std::size_t k) {
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;
    k = std::min(k, n);
    for (std::size_t i = 0; i < k; ++i) {
        const auto j = i + static_cast<std::size_t>(uniform_below(engine, n - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
}

}  // namespace knowada
