#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace prethermal {

inline constexpr double kPi = 3.14159265358979323846;

// Input outside an operation's documented domain.
struct parameter_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Request exceeds an implementation cap (sequence length, exact-integer range, ...).
struct capacity_error : std::length_error {
  using std::length_error::length_error;
};

// An iterative numerical procedure failed to converge or lost validity.
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// splitmix64: tiny deterministic generator, stable across platforms and
// standard libraries (std:: distributions are not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform integer in [lo, hi] inclusive
  std::int64_t next_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(next_u64() % span);
  }

  int next_sign() { return (next_u64() & 1) ? 1 : -1; }

 private:
  std::uint64_t state_;
};

inline unsigned thread_pool_size() {
  if (const char* env = std::getenv("PRETHERMAL_THREADS")) {
    const long v = std::atol(env);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

// Fan a loop [0, n) over a bounded pool. Workers own disjoint index strides;
// results must be written to per-index slots by the caller. The first worker
// exception is rethrown on the calling thread after the join.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_pool_size(), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

// 17 significant digits: doubles round-trip exactly through text.
inline std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace prethermal
