#ifndef SPIX_THREADING_HPP
#define SPIX_THREADING_HPP

#include <atomic>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace spix {

/// Runs fn(block_index, begin, end) over [0, count) split into fixed-size
/// blocks. Block boundaries depend only on `block`, never on the thread
/// count, so any per-block computation is reproducible for any `threads`.
inline void parallel_blocks(std::int64_t count, std::int64_t block, int threads,
                            const std::function<void(std::int64_t, std::int64_t, std::int64_t)>& fn) {
  if (count <= 0) return;
  if (block < 1) block = 1;
  const std::int64_t nblocks = (count + block - 1) / block;
  if (threads < 2 || nblocks < 2) {
    for (std::int64_t b = 0; b < nblocks; ++b)
      fn(b, b * block, std::min(count, (b + 1) * block));
    return;
  }
  std::atomic<std::int64_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::int64_t b = next.fetch_add(1);
      if (b >= nblocks) return;
      fn(b, b * block, std::min(count, (b + 1) * block));
    }
  };
  std::vector<std::thread> pool;
  const int n = static_cast<int>(std::min<std::int64_t>(threads, nblocks));
  pool.reserve(n);
  for (int i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

}  // namespace spix

#endif  // SPIX_THREADING_HPP
