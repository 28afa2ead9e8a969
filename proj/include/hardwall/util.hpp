#pragma once

#include <functional>
#include <vector>

namespace hardwall {

// Number of worker threads: HARDWALL_THREADS if set and positive,
// otherwise the hardware concurrency (at least 1).
int worker_count();

// Runs fn(first, last) over consecutive half-open blocks of fixed size.
// Block boundaries depend only on (begin, end, block), never on the worker
// count, so callers that write per-block results get identical output no
// matter how many threads run.
void parallel_blocks(long begin, long end, long block,
                     const std::function<void(long, long)>& fn);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 1.0;
};

// Least-squares line through (x, y) pairs.  With fewer than three points the
// fit is exact and r2 is reported as 1.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace hardwall
