#pragma once

#include <mutex>

namespace nlch::detail {

// FFTW plan creation and destruction are not re-entrant; execution with the
// new-array interface is. Every planner call in the library takes this lock.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace nlch::detail
