#include <doctest.h>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "mfis/parallel.hpp"

using namespace mfis;

TEST_SUITE_BEGIN("parallel");

TEST_CASE("split_blocks covers the range exactly once") {
  for (std::int64_t n : {0, 1, 7, 1000, 1001}) {
    const auto blocks = split_blocks(n, 64);
    std::int64_t covered = 0, expect_begin = 0;
    for (const auto& b : blocks) {
      CHECK(b.begin == expect_begin);
      CHECK(b.end > b.begin);
      CHECK(b.end - b.begin <= 64);
      covered += b.end - b.begin;
      expect_begin = b.end;
    }
    CHECK(covered == n);
  }
  CHECK(split_blocks(0, 16).empty());
}

TEST_CASE("parallel_for visits every index once") {
  const std::int64_t n = 5000;
  auto hits = std::vector<std::atomic<int>>(std::size_t(n));
  parallel_for(n, 100, [&](std::int64_t b, std::int64_t e) {
    for (std::int64_t i = b; i < e; ++i) hits[std::size_t(i)].fetch_add(1);
  });
  for (std::int64_t i = 0; i < n; ++i) CHECK(hits[std::size_t(i)].load() == 1);
}

TEST_CASE("deterministic block sums independent of thread count") {
  const std::int64_t n = 40000;
  auto data = std::vector<double>(std::size_t(n));
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = std::sin(0.1 * double(i));

  auto block_sum = [&]() {
    const auto blocks = split_blocks(n, 1024);
    std::vector<double> partial(blocks.size(), 0.0);
    parallel_run(blocks.size(), [&](std::size_t b) {
      double s = 0.0;
      for (std::int64_t i = blocks[b].begin; i < blocks[b].end; ++i) s += data[std::size_t(i)];
      partial[b] = s;
    });
    return std::accumulate(partial.begin(), partial.end(), 0.0);
  };

  set_max_threads(1);
  const double s1 = block_sum();
  set_max_threads(4);
  const double s4 = block_sum();
  set_max_threads(0);  // restore default
  CHECK(s1 == s4);     // bitwise equal: identical block partials, identical reduce order
}

TEST_CASE("exceptions propagate out of workers") {
  CHECK_THROWS_AS(parallel_for(100, 10,
                               [](std::int64_t b, std::int64_t) {
                                 if (b == 30) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
  CHECK_THROWS_AS(set_max_threads(-2), std::invalid_argument);
  set_max_threads(0);
}

TEST_SUITE_END();
