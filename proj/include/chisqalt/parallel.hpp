#ifndef CHISQALT_PARALLEL_HPP
#define CHISQALT_PARALLEL_HPP

#include <functional>

#include <Eigen/Dense>

namespace chisqalt {

/// Worker count: CHISQALT_THREADS when set, hardware concurrency otherwise.
int thread_budget();

/// Run fn(begin, end) over a partition of [0, count) across threads. Results
/// must be written to disjoint, preallocated slots so the outcome does not
/// depend on scheduling.
void parallel_for(Eigen::Index count,
                  const std::function<void(Eigen::Index, Eigen::Index)>& fn);

}  // namespace chisqalt

#endif  // CHISQALT_PARALLEL_HPP
