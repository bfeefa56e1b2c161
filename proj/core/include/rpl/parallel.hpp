#pragma once

#include <cstddef>
#include <functional>

namespace rpl {

// Worker count: RP_TOOLKIT_THREADS if set, else hardware concurrency.
int default_threads();
void set_threads(int n);  // n <= 0 restores the default
int threads();

// Runs f(i) for every i in [0, n). Callers write results into slot i, so the
// outcome never depends on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f);

// Sum of f(0..n-1) where each term is computed independently and the terms
// are added in index order. Bit-identical for any worker count.
double ordered_sum(std::size_t n, const std::function<double(std::size_t)>& f);

}  // namespace rpl
