#include "sc2pcr/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>

#include <omp.h>

namespace sc2pcr {

namespace {

int initial_threads() {
  if (const char* env = std::getenv("SC2_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return omp_get_max_threads();
}

std::atomic<int>& thread_setting() {
  static std::atomic<int> value{initial_threads()};
  return value;
}

}  // namespace

int num_threads() { return thread_setting().load(); }

void set_num_threads(int threads) {
  if (threads < 1) throw std::invalid_argument("thread count must be >= 1");
  thread_setting().store(threads);
}

}  // namespace sc2pcr
