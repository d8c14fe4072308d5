#include "timepar/parallel.hpp"

#include <omp.h>

namespace timepar {

namespace {
int g_default_threads = omp_get_max_threads();
}

void set_num_threads(int threads)
{
    omp_set_num_threads(threads < 1 ? g_default_threads : threads);
}

int num_threads()
{
    return omp_get_max_threads();
}

}  // namespace timepar
