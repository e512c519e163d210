#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace paircorr {

/// Name of the environment variable holding the default worker-thread count.
inline constexpr const char* threads_env_var = "PAIRCORR_THREADS";

/// Worker threads used when a caller passes 0: PAIRCORR_THREADS if set to a
/// positive integer, otherwise std::thread::hardware_concurrency().
std::size_t default_thread_count();

/// Runs body(i) for i in [0, count) on up to `threads` workers (0 = default).
/// Work items are claimed dynamically; callers write results into per-index
/// slots so the outcome does not depend on scheduling. The first exception
/// thrown by any body is rethrown after all workers have joined.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  std::size_t threads = 0);

/// Seed of the independent random substream `stream` derived from `seed`
/// (SplitMix64 finalizer).
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

} // namespace paircorr
