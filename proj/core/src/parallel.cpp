#include "mfis/parallel.hpp"

#include <atomic>
#include <stdexcept>
#include <thread>

namespace mfis {

namespace {
std::atomic<int> g_max_threads{0};  // 0 = uninitialized -> hardware
}

int max_threads() {
  int n = g_max_threads.load(std::memory_order_relaxed);
  if (n <= 0) {
    unsigned hw = std::thread::hardware_concurrency();
    n = hw ? int(hw) : 1;
  }
  return n;
}

void set_max_threads(int n) {
  if (n < 0) throw std::invalid_argument("set_max_threads: thread cap must be >= 0");
  g_max_threads.store(n, std::memory_order_relaxed);  // 0 restores the hardware default
}

std::vector<IndexRange> split_blocks(std::int64_t n, std::int64_t grain) {
  if (n < 0) throw std::invalid_argument("split_blocks: negative range");
  if (grain < 1) grain = 1;
  std::vector<IndexRange> blocks;
  blocks.reserve(std::size_t((n + grain - 1) / grain));
  for (std::int64_t b = 0; b < n; b += grain) blocks.push_back({b, std::min(b + grain, n)});
  return blocks;
}

void parallel_run(std::size_t n_blocks, const std::function<void(std::size_t)>& body) {
  const int threads = std::min<std::int64_t>(max_threads(), std::int64_t(n_blocks));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n_blocks; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n_blocks || failed.load(std::memory_order_relaxed)) return;
      try {
        body(i);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(std::size_t(threads) - 1);
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

void parallel_for(std::int64_t n, std::int64_t grain,
                  const std::function<void(std::int64_t, std::int64_t)>& body) {
  auto blocks = split_blocks(n, grain);
  parallel_run(blocks.size(), [&](std::size_t i) { body(blocks[i].begin, blocks[i].end); });
}

}  // namespace mfis
