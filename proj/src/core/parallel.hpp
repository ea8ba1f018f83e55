// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace gwperc {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

/// Runs fn(index, worker) for index in [begin, end). Indices are handed out
/// in chunks; callers must write results by index (or reduce with
/// order-independent operations) so output never depends on `threads`.
template <class Fn>
void parallel_for(std::uint64_t begin, std::uint64_t end, int threads, Fn&& fn) {
  if (end <= begin) return;
  const int workers =
      static_cast<int>(std::min<std::uint64_t>(resolve_threads(threads), end - begin));
  if (workers == 1) {
    for (std::uint64_t i = begin; i < end; ++i) fn(i, 0);
    return;
  }
  constexpr std::uint64_t kChunk = 64;
  std::atomic<std::uint64_t> next{begin};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        while (true) {
          const std::uint64_t lo = next.fetch_add(kChunk);
          if (lo >= end) break;
          const std::uint64_t hi = std::min(end, lo + kChunk);
          for (std::uint64_t i = lo; i < hi; ++i) fn(i, w);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        next.store(end);
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace gwperc
