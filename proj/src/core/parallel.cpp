#include "embedgauge/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace embedgauge {

int max_threads() noexcept {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

double pairwise_sum(std::span<const double> values) noexcept {
    // Below this size a plain left-to-right loop; the split points depend only
    // on the length, so the association order is fixed.
    constexpr std::size_t leaf = 8;
    if (values.size() <= leaf) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace embedgauge
