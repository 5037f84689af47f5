#include "sc2pcr/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sc2pcr {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t prod = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(prod >> 32);
  lo = static_cast<std::uint32_t>(prod);
}

}  // namespace

RandomStream::Block RandomStream::philox(Block ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kPhiloxW0;
      key[1] += kPhiloxW1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
    mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      counter_{0u, 0u, static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)} {}

void RandomStream::refill() {
  buffer_ = philox(counter_, key_);
  if (++counter_[0] == 0) ++counter_[1];
  used_ = 0;
}

std::uint32_t RandomStream::next_u32() {
  if (used_ == 4) refill();
  return buffer_[static_cast<std::size_t>(used_++)];
}

std::uint64_t RandomStream::next_u64() {
  const std::uint64_t hi = next_u32();
  return (hi << 32) | next_u32();
}

double RandomStream::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

std::uint64_t RandomStream::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("below(0)");
  // Rejection keeps the result unbiased.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % n;
}

double RandomStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

BinomialSampler::BinomialSampler(std::uint64_t max_n) : log_factorial_(max_n + 1, 0.0) {
  for (std::uint64_t k = 1; k <= max_n; ++k) {
    log_factorial_[k] = log_factorial_[k - 1] + std::log(static_cast<double>(k));
  }
}

std::uint64_t BinomialSampler::operator()(RandomStream& rng, std::uint64_t n, double p) const {
  if (n + 1 > log_factorial_.size()) throw std::out_of_range("binomial n exceeds sampler table");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("binomial p must lie in [0, 1]");
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;
  if (p > 0.5) return n - (*this)(rng, n, 1.0 - p);
  if (static_cast<double>(n) * p < 10.0) return inversion(rng, n, p);
  return btrs(rng, n, p);
}

std::uint64_t BinomialSampler::inversion(RandomStream& rng, std::uint64_t n, double p) const {
  const double q = 1.0 - p;
  const double start = std::pow(q, static_cast<double>(n));
  for (;;) {
    double u = rng.uniform();
    double r = start;
    std::uint64_t k = 0;
    while (u > r) {
      u -= r;
      ++k;
      if (k > n) break;
      r *= static_cast<double>(n - k + 1) * p / (static_cast<double>(k) * q);
    }
    if (k <= n) return k;
  }
}

std::uint64_t BinomialSampler::btrs(RandomStream& rng, std::uint64_t n, double p) const {
  const double q = 1.0 - p;
  const double nd = static_cast<double>(n);
  const double spq = std::sqrt(nd * p * q);
  const double b = 1.15 + 2.53 * spq;
  const double a = -0.0873 + 0.0248 * b + 0.01 * p;
  const double c = nd * p + 0.5;
  const double vr = 0.92 - 4.2 / b;
  const double alpha = (2.83 + 5.1 / b) * spq;
  const double lpq = std::log(p / q);
  const auto m = static_cast<std::uint64_t>(std::floor((nd + 1.0) * p));
  const double lm = log_factorial_[m] + log_factorial_[n - m];
  for (;;) {
    const double u = rng.uniform() - 0.5;
    double v = rng.uniform();
    const double us = 0.5 - std::abs(u);
    const double kd = std::floor((2.0 * a / us + b) * u + c);
    if (kd < 0.0 || kd > nd) continue;
    const auto k = static_cast<std::uint64_t>(kd);
    if (us >= 0.07 && v <= vr) return k;
    v = std::log(v * alpha / (a / (us * us) + b));
    const double h = lm - log_factorial_[k] - log_factorial_[n - k] +
                     (static_cast<double>(k) - static_cast<double>(m)) * lpq;
    if (v <= h) return k;
  }
}

}  // namespace sc2pcr
