#include "gerbelab/numeric.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

namespace gerbelab {

namespace {

template <typename T>
T pairwise_sum_impl(std::span<const T> values) {
  const std::size_t n = values.size();
  if (n == 0) return T{};
  if (n <= 8) {
    T acc = values[0];
    for (std::size_t i = 1; i < n; ++i) acc += values[i];
    return acc;
  }
  const std::size_t half = n / 2;
  return pairwise_sum_impl(values.first(half)) +
         pairwise_sum_impl(values.subspan(half));
}

}  // namespace

Complex pairwise_sum(std::span<const Complex> values) {
  return pairwise_sum_impl(values);
}

double pairwise_sum(std::span<const double> values) {
  return pairwise_sum_impl(values);
}

int thread_cap() {
  if (const char* env = std::getenv("GERBELAB_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) return static_cast<int>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const int threads = std::min<int>(thread_cap(), static_cast<int>(n));
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  const std::size_t chunk = (n + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const std::size_t begin = static_cast<std::size_t>(t) * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&body, begin, end] {
      for (std::size_t i = begin; i < end; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace gerbelab
