// Copyright (c) 2026 The procam authors.
// SPDX-License-Identifier: Apache-2.0

#include <procam/parallel.h>

#include <cstdlib>
#include <exception>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace procam {

namespace {

int initial_thread_count() {
    if (const char *env = std::getenv("PROCAM_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

int &thread_setting() {
    static int n = initial_thread_count();
    return n;
}

}  // namespace

int thread_count() { return thread_setting(); }

void set_thread_count(int n) { thread_setting() = n > 0 ? n : 1; }

void parallel_for(int64_t n, const std::function<void(int64_t)> &fn, bool serial) {
    int threads = thread_count();
    if (serial || threads <= 1 || n <= 1) {
        for (int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
#ifdef _OPENMP
    // Exceptions must not escape an OpenMP region; keep the first one.
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (int64_t i = 0; i < n; ++i) {
        try {
            fn(i);
        } catch (...) {
#pragma omp critical(procam_parallel_error)
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
#else
    for (int64_t i = 0; i < n; ++i) fn(i);
#endif
}

}  // namespace procam
