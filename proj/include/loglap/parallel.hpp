#pragma once

#include <Eigen/Core>

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace loglap {

// Thread cap from LOGLAP_THREADS (0 or unset = runtime default).
inline int configured_threads() {
    const char* env = std::getenv("LOGLAP_THREADS");
    if (!env) return 0;
    try {
        const int v = std::stoi(env);
        return v > 0 ? v : 0;
    } catch (const std::exception&) {
        return 0;
    }
}

// Runs body(i) for i in [0, count). Iterations must write disjoint outputs;
// each body evaluation is sequential, so results do not depend on the thread count.
template <typename Body>
void parallel_for(Eigen::Index count, Body&& body) {
#ifdef _OPENMP
    static const int threads = configured_threads();
    const int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 16) num_threads(nt) if (count > 64)
    for (Eigen::Index i = 0; i < count; ++i) body(i);
#else
    for (Eigen::Index i = 0; i < count; ++i) body(i);
#endif
}

} // namespace loglap
