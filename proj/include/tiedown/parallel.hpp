#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

#include "random.hpp"

namespace tiedown {

/// Worker-pool settings shared by the Monte Carlo drivers. Work is cut into
/// fixed chunks; chunk `c` always draws from `split_stream(seed, c)` and
/// partial results are merged in chunk order, so the number of workers
/// changes wall time only.
struct Parallelism {
  std::uint64_t seed = 1;
  unsigned workers = 1;
};

/// Evaluates `fn(chunk, rng)` for chunk indices [first, first + count) and
/// returns the results indexed by chunk.
template <class Fn>
auto run_chunks(const Parallelism& par, std::size_t first, std::size_t count, Fn&& fn) {
  using Result = std::invoke_result_t<Fn&, std::size_t, Rng&>;
  std::vector<Result> out(count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        Rng rng = split_stream(par.seed, first + i);
        out[i] = fn(first + i, rng);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
        return;
      }
    }
  };

  const unsigned n_threads = std::max(1u, std::min<unsigned>(par.workers, static_cast<unsigned>(count)));
  if (n_threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

/// Runs chunks 0, 1, 2, ... in batches until the running total of
/// `count(result)` reaches `target`, and returns the shortest prefix of
/// chunk results that reaches it. The prefix does not depend on the batch
/// size or worker count. `guard(chunks, total)` is called after every batch
/// that falls short and may throw to abort.
template <class Fn, class Count, class Guard>
auto run_until(const Parallelism& par, std::size_t target, Fn&& fn, Count&& count, Guard&& guard) {
  using Result = std::invoke_result_t<Fn&, std::size_t, Rng&>;
  std::vector<Result> prefix;
  std::size_t total = 0;
  const std::size_t batch = std::max<std::size_t>(4, 4 * static_cast<std::size_t>(par.workers));
  while (total < target) {
    auto results = run_chunks(par, prefix.size(), batch, fn);
    for (auto& r : results) {
      if (total >= target) break;
      total += count(r);
      prefix.push_back(std::move(r));
    }
    if (total < target) guard(prefix.size(), total);
  }
  return prefix;
}

}  // namespace tiedown
