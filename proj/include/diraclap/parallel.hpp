#pragma once

#include <cstddef>
#include <functional>

namespace diraclap {

/// Worker count used by sweeps when the caller does not pass one (default 1).
int default_threads();
void set_default_threads(int threads);

/// Runs fn(i) for i in [0, count) on up to `threads` workers (0 = default).
/// Index assignment is static, so results written by index are thread-count independent.
/// The first exception (lowest index) is rethrown after all workers finish.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn, int threads = 0);

}  // namespace diraclap
