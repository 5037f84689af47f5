#pragma once

namespace sc2pcr {

/// Worker count used by every parallel loop in the library. Defaults to the
/// SC2_THREADS environment variable when set, else the OpenMP default.
/// Results never depend on this value.
int num_threads();
void set_num_threads(int threads);

/// Restores the previous thread count on destruction.
class ScopedThreads {
 public:
  explicit ScopedThreads(int threads) : previous_(num_threads()) { set_num_threads(threads); }
  ~ScopedThreads() { set_num_threads(previous_); }
  ScopedThreads(const ScopedThreads&) = delete;
  ScopedThreads& operator=(const ScopedThreads&) = delete;

 private:
  int previous_;
};

}  // namespace sc2pcr
