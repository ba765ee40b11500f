#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

namespace seqtest {

// Parallelism handle passed down from the CLI (or tests) into the kernels.
// Kernels never spawn threads on their own; they hand this to OpenMP via
// num_threads.  threads == 1 runs every loop serially in the calling thread.
//
// All kernels are written so that results are bit-identical for any thread
// count: parallel loops write disjoint elements and every floating-point
// reduction is performed serially in a fixed order.
struct Par {
    int threads = 1;

    static Par max() {
#ifdef _OPENMP
        return Par{omp_get_max_threads()};
#else
        return Par{1};
#endif
    }
    bool enabled() const { return threads > 1; }
};

}  // namespace seqtest
