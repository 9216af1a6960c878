#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <vector>

namespace knowada {

// Runs body(i) for i in [0, count) on up to `jobs` threads. Exceptions are
// captured per index; the returned vector has one slot per index (null on
// success). The caller decides how failures are reported.
std::vector<std::exception_ptr> parallel_for(std::size_t count, std::size_t jobs,
                                             const std::function<void(std::size_t)>& body);

}  // namespace knowada
