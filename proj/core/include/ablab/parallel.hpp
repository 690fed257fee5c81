// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace ablab {

// Number of worker threads used by parallel_for. Defaults to the hardware
// concurrency; set_thread_count(0) restores the default.
unsigned thread_count();
void set_thread_count(unsigned n);

/// Runs body(i) for i in [0, n). Work items are claimed dynamically, so the
/// body must only write to slots owned by i. Exceptions thrown by any item
/// are rethrown on the calling thread (the first one wins).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Fixed-shape pairwise summation. The tree depends only on the length of
/// the input, so results are bit-identical for any thread count.
double pairwise_sum(std::span<const double> values);

/// Runs f(i) for every realization in parallel and returns the results in
/// index order.
template <class F>
std::vector<double> map_realizations(std::size_t n, F&& f) {
  std::vector<double> out(n);
  parallel_for(n, [&](std::size_t i) { out[i] = f(i); });
  return out;
}

}  // namespace ablab
