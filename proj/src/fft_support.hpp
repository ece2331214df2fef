#pragma once

#include <mutex>

namespace magque::detail {

// FFTW planning is not thread safe; execution is.
std::mutex& fftw_planner_mutex();

}  // namespace magque::detail
