#pragma once

#include <functional>

namespace nlch {

/// Runs body(i) for i in [0, count) on up to `threads` worker threads.
/// The first exception thrown by any body is rethrown after all workers join.
void parallel_for(int count, int threads, const std::function<void(int)>& body);

}  // namespace nlch
