#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace sc2pcr {

/// Philox4x32-10 counter-based generator (Salmon et al., Random123).
/// A stream is identified by (seed, stream id); the block counter advances
/// inside it. Every draw is a pure function of (seed, stream, position), so
/// work split across threads by stream id reproduces bit-for-bit.
///
/// The distributions below are implemented here rather than taken from
/// <random>, whose distribution algorithms differ between standard libraries.
class RandomStream {
 public:
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  RandomStream(std::uint64_t seed, std::uint64_t stream);

  static Block philox(Block counter, Key key);

  std::uint32_t next_u32();
  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }
  /// Standard normal via the Box-Muller transform.
  double normal();

 private:
  void refill();

  Key key_{};
  Block counter_{};
  Block buffer_{};
  int used_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Exact Binomial(n, p) sampler: inversion for n*p < 10, Hormann's BTRS
/// transformed rejection otherwise. Holds a log-factorial table for n up to
/// `max_n` so sampling never calls lgamma.
class BinomialSampler {
 public:
  explicit BinomialSampler(std::uint64_t max_n);

  std::uint64_t operator()(RandomStream& rng, std::uint64_t n, double p) const;

 private:
  std::uint64_t inversion(RandomStream& rng, std::uint64_t n, double p) const;
  std::uint64_t btrs(RandomStream& rng, std::uint64_t n, double p) const;

  std::vector<double> log_factorial_;
};

}  // namespace sc2pcr
