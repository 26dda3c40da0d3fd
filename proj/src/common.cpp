#include "interplab/common.hpp"

#include <atomic>
#include <cstdlib>

namespace interplab {

Norm parse_norm(const std::string& s) {
  if (s == "l1" || s == "L1") return Norm::L1;
  if (s == "l2" || s == "L2") return Norm::L2;
  if (s == "linf" || s == "Linf" || s == "LInf") return Norm::Linf;
  throw UnsupportedNorm("unknown norm tag: " + s);
}

void parallel_for(Index count, int n_threads, const std::function<void(Index)>& fn) {
  if (count <= 0) return;
  n_threads = std::max(1, n_threads);
  if (n_threads == 1 || count == 1) {
    for (Index i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<Index> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&]() {
    while (true) {
      const Index i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int spawn = static_cast<int>(std::min<Index>(n_threads, count));
  pool.reserve(spawn);
  for (int t = 0; t < spawn; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

int default_thread_count() {
  if (const char* env = std::getenv("LAB_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace interplab
