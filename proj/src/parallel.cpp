#include "chisqalt/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace chisqalt {

int thread_budget() {
  if (const char* env = std::getenv("CHISQALT_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_for(Eigen::Index count,
                  const std::function<void(Eigen::Index, Eigen::Index)>& fn) {
  if (count <= 0) return;
  const int workers = std::min<Eigen::Index>(thread_budget(), count);
  if (workers <= 1) {
    fn(0, count);
    return;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  const Eigen::Index chunk = (count + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const Eigen::Index begin = static_cast<Eigen::Index>(w) * chunk;
    const Eigen::Index end = std::min(begin + chunk, count);
    if (begin >= end) break;
    threads.emplace_back([&, w, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace chisqalt
