#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace sc2pcr::theory {

/// Parameters of the outlier model: N correspondences, inlier ratio alpha,
/// and the probability p that an unrelated pair passes the compatibility
/// threshold (p = d_thr * f0).
struct AmbiguityModel {
  std::size_t n = 0;
  double alpha = 0.0;
  double p = 0.0;

  /// Throws std::domain_error unless 0 < alpha < 1, 0 < p < 1, N*alpha >= 2.
  void validate() const;
  /// round(N * alpha), the inlier count used by the simulators.
  std::size_t inlier_count() const;
};

/// Probability masses on consecutive integers starting at `offset`.
struct DiscreteDist {
  std::int64_t offset = 0;
  std::vector<double> masses;
  /// Mass dropped below `offset` and above the last support point.
  double lower_tail = 0.0;
  double upper_tail = 0.0;

  double total() const;
  double mean() const;
  double at(std::int64_t k) const;
};

/// First-order ambiguity P(d_in,out < d_in,in) = p / 2.
double sc_ambiguity(double p);

/// Poisson(lambda) masses, truncated on both sides so each dropped tail is
/// below `cutoff_mass / 2`.
DiscreteDist poisson_pmf(double lambda, double cutoff_mass = 1e-12);

/// P(X1 - X2 > k) for independent X1 ~ Poisson(mu1), X2 ~ Poisson(mu2).
double skellam_tail(double mu1, double mu2, std::int64_t k);

/// Skellam rates (mu1, mu2) of the second-order ambiguity model.
struct SkellamRates {
  double mu1 = 0.0;
  double mu2 = 0.0;
};
SkellamRates sc2_skellam_rates(const AmbiguityModel& model);

/// p * P(X > threshold), X ~ Skellam(mu1, mu2).
double sc2_ambiguity_at(const AmbiguityModel& model, std::int64_t threshold);

/// sc2_ambiguity_at with threshold = N*alpha - 2 rounded to nearest.
double sc2_ambiguity(const AmbiguityModel& model);

/// Analytic value evaluated with the floor and ceil of N*alpha - 2; both
/// equal sc2_ambiguity when N*alpha is an integer.
struct ThresholdSensitivity {
  double rounded = 0.0;
  double floor_value = 0.0;
  double ceil_value = 0.0;
  bool differs() const { return floor_value != ceil_value; }
};
ThresholdSensitivity sc2_ambiguity_sensitivity(const AmbiguityModel& model);

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t trials = 0;
  std::size_t hits = 0;
};

/// Monte Carlo estimate of P(SC2_in,out > SC2_in,in) under the generative
/// model: inlier pairs always compatible, every other pair Bernoulli(p).
///
/// Each trial draws exactly the compatibility entries that the two compared
/// SC2 values depend on, with their joint law intact. Reproducible from
/// `seed` and independent of the thread count.
McEstimate mc_ambiguity_sc2(const AmbiguityModel& model, std::size_t trials, std::uint64_t seed);

/// Same event, but each trial materializes the whole N x N compatibility
/// matrix and evaluates SC2 with sc2_matrix. O(N^2) per trial; meant for
/// small N and for cross-checking mc_ambiguity_sc2.
McEstimate mc_ambiguity_sc2_full(const AmbiguityModel& model, std::size_t trials, std::uint64_t seed);

/// Monte Carlo estimate of P(d_in,out < d_in,in) with d_in,in uniform on
/// [0, d_thr] and d_in,out of constant density f0 on that window, where
/// p_window = d_thr * f0.
McEstimate mc_ambiguity_sc(double p_window, std::size_t trials, std::uint64_t seed);

}  // namespace sc2pcr::theory
