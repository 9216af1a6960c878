#include "knowada/core/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace knowada {

std::vector<std::exception_ptr> parallel_for(std::size_t count, std::size_t jobs,
                                             const std::function<void(std::size_t)>& body) {
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t threads = std::min(std::max<std::size_t>(jobs, 1), count);
    if (threads <= 1) {
        worker();
        return errors;
    }
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    pool.clear();  // joins
    return errors;
}

}  // namespace knowada
