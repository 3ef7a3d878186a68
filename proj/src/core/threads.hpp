#pragma once

#include <cstddef>
#include <functional>

namespace msbif {

// Worker count from MSBIF_THREADS (0 or unset means hardware concurrency).
std::size_t worker_count();

// Runs body(i) for i in [0, n) across workers. Bodies must write only to
// their own index's output slots; results are then independent of the
// scheduling, which keeps parallel runs bit-identical to serial ones.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace msbif
