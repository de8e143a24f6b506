#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace ruinld {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(block_index, begin, end) over [0, n_items) split into fixed-size
/// blocks. Blocks are claimed dynamically, but a block's identity, its item
/// range and its RNG keys depend only on the block index, so anything written
/// into per-block slots is identical for any thread count.
template <typename Fn>
void for_each_block(std::uint64_t n_items, std::uint64_t block_size,
                    int threads, Fn&& fn) {
  const std::uint64_t n_blocks =
      n_items == 0 ? 0 : (n_items + block_size - 1) / block_size;
  threads = resolve_threads(threads);
  if (threads <= 1 || n_blocks <= 1) {
    for (std::uint64_t b = 0; b < n_blocks; ++b) {
      const std::uint64_t begin = b * block_size;
      fn(b, begin, std::min(begin + block_size, n_items));
    }
    return;
  }
  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::uint64_t b = next.fetch_add(1, std::memory_order_relaxed);
      if (b >= n_blocks) return;
      const std::uint64_t begin = b * block_size;
      fn(b, begin, std::min(begin + block_size, n_items));
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads) - 1);
  for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
}

constexpr std::uint64_t kDefaultBlock = 4096;

}  // namespace ruinld
