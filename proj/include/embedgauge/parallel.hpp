#pragma once

#include <cstddef>
#include <span>

namespace embedgauge {

// Selects between the OpenMP kernel and its serial reference. Both paths
// produce bit-identical results; the serial path exists for testing and for
// environments built without OpenMP.
enum class ExecPolicy { serial, parallel };

// Number of worker threads the parallel policy will use (1 without OpenMP).
int max_threads() noexcept;

// Sum in a fixed binary-tree order, independent of thread count.
double pairwise_sum(std::span<const double> values) noexcept;

}  // namespace embedgauge
