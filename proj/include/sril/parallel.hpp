#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sril {

/// Kernels that have both a serial reference path and an OpenMP path take
/// this switch. Both paths are bitwise-identical by construction: every
/// output element is written by exactly one iteration and reductions run
/// in a fixed index order, so the OpenMP path is safe to use everywhere
/// and the serial path stays around as the reference for tests and the
/// kernel benchmark.
enum class ParallelMode { Serial, OpenMp };

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace sril
