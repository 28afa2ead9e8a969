#include "hardwall/util.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace hardwall {

int worker_count() {
  if (const char* s = std::getenv("HARDWALL_THREADS")) {
    int v = std::atoi(s);
    if (v > 0) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

void parallel_blocks(long begin, long end, long block,
                     const std::function<void(long, long)>& fn) {
  if (end <= begin) return;
  long nblocks = (end - begin + block - 1) / block;
  int workers = worker_count();
  if (workers > nblocks) workers = static_cast<int>(nblocks);
  if (workers <= 1) {
    for (long b = 0; b < nblocks; ++b) {
      long lo = begin + b * block;
      long hi = lo + block < end ? lo + block : end;
      fn(lo, hi);
    }
    return;
  }
  std::atomic<long> next{0};
  auto drain = [&] {
    for (;;) {
      long b = next.fetch_add(1);
      if (b >= nblocks) return;
      long lo = begin + b * block;
      long hi = lo + block < end ? lo + block : end;
      fn(lo, hi);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int i = 1; i < workers; ++i) pool.emplace_back(drain);
  drain();
  for (auto& t : pool) t.join();
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LineFit out;
  size_t n = x.size();
  if (n == 0 || y.size() != n) return out;
  double sx = 0, sy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < n; ++i) {
    double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0) return out;
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  if (n <= 2 || syy == 0) {
    out.r2 = 1.0;
  } else {
    out.r2 = (sxy * sxy) / (sxx * syy);
  }
  return out;
}

}  // namespace hardwall
