#include "slcalib/parallel.hpp"

#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace slcalib {

int thread_count() {
  if (const char* env = std::getenv("SLCALIB_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<int>(v);
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc >= 1 ? static_cast<int>(hc) : 1;
}

void parallel_for(long n, const std::function<void(long)>& body) {
  if (n <= 0) return;
  long workers = thread_count();
  if (workers > n) workers = n;
  if (workers <= 1) {
    for (long i = 0; i < n; ++i) body(i);
    return;
  }
  // Contiguous block partition: worker w handles [w*n/W, (w+1)*n/W).
  // The partition is a pure function of (n, W), so per-index results land
  // in caller-owned slots deterministically.
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errs(workers);
  pool.reserve(workers);
  for (long w = 0; w < workers; ++w) {
    long lo = w * n / workers;
    long hi = (w + 1) * n / workers;
    pool.emplace_back([&, lo, hi, w] {
      try {
        for (long i = lo; i < hi; ++i) body(i);
      } catch (...) {
        errs[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

}  // namespace slcalib
