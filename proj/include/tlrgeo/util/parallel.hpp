#pragma once

#include <functional>

#include "tlrgeo/common.hpp"

namespace tlrgeo::util {

// Process-wide worker cap for tile-level loops. Defaults to 1 (sequential);
// the CLI raises it from --threads. Results do not depend on the value: every
// task owns its output tile and no reductions cross task boundaries.
int num_threads() noexcept;
void set_num_threads(int n) noexcept;

// Runs fn(i) for i in [0, n). Static block partition across workers; rethrows
// the first task exception.
void parallel_for(index_t n, const std::function<void(index_t)>& fn);

} // namespace tlrgeo::util
