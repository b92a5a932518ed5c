// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tripclust {

// Every parallel kernel in this library has a serial twin that computes the
// same bits (threads only ever fill disjoint output slots), so the choice of
// execution policy never changes results, only wall time.
enum class Execution {
  serial,
  parallel,
  automatic,  // parallel once the item count clears the kernel's threshold
};

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline bool run_parallel(Execution exec, std::size_t items, std::size_t threshold) {
#ifndef _OPENMP
  (void)exec;
  (void)items;
  (void)threshold;
  return false;
#else
  switch (exec) {
    case Execution::serial:
      return false;
    case Execution::parallel:
      return true;
    case Execution::automatic:
      return items >= threshold && max_threads() > 1;
  }
  return false;
#endif
}

}  // namespace tripclust
