#pragma once

#include <cstddef>
#include <exception>
#include <functional>

namespace helio {

/// Runs fn(0) .. fn(n-1) on up to `jobs` threads. Each index must write only its own output
/// slot; the first exception by index is rethrown after all workers finish.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace helio
