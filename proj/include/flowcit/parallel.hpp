#pragma once

#include <functional>

namespace flowcit {

// Runs fn(i) for i in [0, count). With workers > 1, tasks are pulled from a
// shared counter by a small thread pool; each task must write only to its own
// output slot so results are identical for any worker count. The first
// exception thrown by a task is rethrown after all threads join.
void parallel_for(int count, int workers, const std::function<void(int)>& fn);

} // namespace flowcit
