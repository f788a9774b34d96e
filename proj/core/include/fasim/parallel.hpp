#pragma once

#include <cstddef>
#include <functional>

namespace fasim {

/// Worker cap used by parallel_for. Defaults to FASIM_THREADS when set,
/// otherwise the hardware concurrency.
int thread_count() noexcept;
void set_thread_count(int threads) noexcept;

/// Runs body(i) for i in [0, count). Each index is processed exactly once and
/// results must be written to per-index slots, which keeps output independent
/// of the schedule. Calls made from inside a worker run inline.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace fasim
