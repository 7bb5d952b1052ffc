// Copyright (c) 2026 The procam authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef PROCAM_PARALLEL_H
#define PROCAM_PARALLEL_H

#include <cstdint>
#include <functional>

namespace procam {

// Number of worker threads used by the OpenMP kernels. Initialized from
// PROCAM_THREADS (or the OpenMP default) and overridable at runtime.
int thread_count();
void set_thread_count(int n);

// Runs fn(i) for i in [0, n). Iterations must be independent; with
// `serial` set the loop runs in index order on the calling thread, which
// is the reference path used by tests and benchmarks.
void parallel_for(int64_t n, const std::function<void(int64_t)> &fn, bool serial = false);

}  // namespace procam

#endif  // PROCAM_PARALLEL_H
