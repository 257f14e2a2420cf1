#include "flowlab/parallel.hpp"

namespace flowlab {

void set_workers(int workers) {
  if (workers > 0) omp_set_num_threads(workers);
}

int workers() { return omp_get_max_threads(); }

}  // namespace flowlab
