#include "sc2pcr/theory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sc2pcr/compat.hpp"
#include "sc2pcr/parallel.hpp"
#include "sc2pcr/rng.hpp"

namespace sc2pcr::theory {

namespace {

McEstimate summarize(std::size_t hits, std::size_t trials) {
  McEstimate e;
  e.trials = trials;
  e.hits = hits;
  e.estimate = static_cast<double>(hits) / static_cast<double>(trials);
  e.std_error = std::sqrt(e.estimate * (1.0 - e.estimate) / static_cast<double>(trials));
  return e;
}

void check_mc_model(const AmbiguityModel& model, std::size_t trials) {
  model.validate();
  if (trials < 1) throw std::domain_error("Monte Carlo needs at least one trial");
  const std::size_t inliers = model.inlier_count();
  if (inliers < 2) throw std::domain_error("ambiguity event needs at least 2 inliers");
  if (inliers >= model.n) throw std::domain_error("ambiguity event needs at least 1 outlier");
}

}  // namespace

void AmbiguityModel::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("alpha must lie in (0, 1)");
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("p must lie in (0, 1)");
  if (static_cast<double>(n) * alpha < 2.0) throw std::domain_error("N * alpha must be at least 2");
}

std::size_t AmbiguityModel::inlier_count() const {
  return static_cast<std::size_t>(std::llround(static_cast<double>(n) * alpha));
}

double DiscreteDist::total() const {
  double s = 0.0;
  for (double m : masses) s += m;
  return s;
}

double DiscreteDist::mean() const {
  double s = 0.0;
  for (std::size_t i = 0; i < masses.size(); ++i) s += masses[i] * static_cast<double>(offset + static_cast<std::int64_t>(i));
  return s;
}

double DiscreteDist::at(std::int64_t k) const {
  if (k < offset) return 0.0;
  const auto idx = static_cast<std::size_t>(k - offset);
  return idx < masses.size() ? masses[idx] : 0.0;
}

double sc_ambiguity(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("p must lie in (0, 1)");
  return p / 2.0;
}

DiscreteDist poisson_pmf(double lambda, double cutoff_mass) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::domain_error("Poisson rate must be finite and >= 0");
  if (!(cutoff_mass > 0.0)) throw std::domain_error("cutoff mass must be positive");
  DiscreteDist d;
  if (lambda == 0.0) {
    d.masses = {1.0};
    return d;
  }
  const double half = cutoff_mass / 2.0;
  const auto mode = static_cast<std::int64_t>(std::floor(lambda));
  const double mode_mass =
      std::exp(-lambda + static_cast<double>(mode) * std::log(lambda) - std::lgamma(static_cast<double>(mode) + 1.0));

  // Upward from the mode. Beyond k > lambda the ratio of successive masses is
  // below lambda / (k + 1), which bounds the remaining tail geometrically.
  std::vector<double> up{mode_mass};
  for (std::int64_t k = mode;; ++k) {
    const double next = up.back() * lambda / static_cast<double>(k + 1);
    const double ratio = lambda / static_cast<double>(k + 2);
    if (ratio < 1.0) {
      const double bound = next / (1.0 - ratio);
      if (bound < half) {
        d.upper_tail = bound;
        break;
      }
    }
    up.push_back(next);
  }

  // Downward: below the mode the ratio pmf(k-1)/pmf(k) = k / lambda < 1.
  std::vector<double> down;
  double cur = mode_mass;
  std::int64_t k = mode;
  while (k > 0) {
    const double prev = cur * static_cast<double>(k) / lambda;
    const double ratio = static_cast<double>(k - 1) / lambda;
    const double bound = prev / (1.0 - ratio);
    if (bound < half) {
      d.lower_tail = bound;
      break;
    }
    down.push_back(prev);
    cur = prev;
    --k;
  }
  d.offset = k;
  d.masses.assign(down.rbegin(), down.rend());
  d.masses.insert(d.masses.end(), up.begin(), up.end());
  return d;
}

double skellam_tail(double mu1, double mu2, std::int64_t k) {
  if (!(mu1 >= 0.0) || !(mu2 >= 0.0)) throw std::domain_error("Skellam rates must be non-negative");
  const DiscreteDist a = poisson_pmf(mu1);
  const DiscreteDist b = poisson_pmf(mu2);

  // suffix[i] = P(X1 >= a.offset + i), summed from the small end.
  std::vector<double> suffix(a.masses.size() + 1, 0.0);
  for (std::size_t i = a.masses.size(); i-- > 0;) suffix[i] = suffix[i + 1] + a.masses[i];
  auto survival = [&](std::int64_t m) {  // P(X1 > m)
    const std::int64_t idx = m + 1 - a.offset;
    if (idx <= 0) return suffix[0];
    if (static_cast<std::size_t>(idx) >= suffix.size()) return 0.0;
    return suffix[static_cast<std::size_t>(idx)];
  };

  double total = 0.0;
  for (std::size_t j = 0; j < b.masses.size(); ++j) {
    const std::int64_t x2 = b.offset + static_cast<std::int64_t>(j);
    total += b.masses[j] * survival(k + x2);
  }
  return std::clamp(total, 0.0, 1.0);
}

SkellamRates sc2_skellam_rates(const AmbiguityModel& model) {
  model.validate();
  const double n = static_cast<double>(model.n);
  const double na = n * model.alpha;
  const double p = model.p;
  return {(na - 1.0) * p + (n * (1.0 - model.alpha) - 1.0) * p * p, n * (1.0 - model.alpha) * p * p};
}

double sc2_ambiguity_at(const AmbiguityModel& model, std::int64_t threshold) {
  const SkellamRates r = sc2_skellam_rates(model);
  return model.p * skellam_tail(r.mu1, r.mu2, threshold);
}

double sc2_ambiguity(const AmbiguityModel& model) {
  model.validate();
  const double threshold = static_cast<double>(model.n) * model.alpha - 2.0;
  return sc2_ambiguity_at(model, std::llround(threshold));
}

ThresholdSensitivity sc2_ambiguity_sensitivity(const AmbiguityModel& model) {
  model.validate();
  const double threshold = static_cast<double>(model.n) * model.alpha - 2.0;
  ThresholdSensitivity s;
  s.rounded = sc2_ambiguity_at(model, std::llround(threshold));
  s.floor_value = sc2_ambiguity_at(model, static_cast<std::int64_t>(std::floor(threshold)));
  s.ceil_value = sc2_ambiguity_at(model, static_cast<std::int64_t>(std::ceil(threshold)));
  return s;
}

McEstimate mc_ambiguity_sc2(const AmbiguityModel& model, std::size_t trials, std::uint64_t seed) {
  check_mc_model(model, trials);
  const std::uint64_t inliers = model.inlier_count();
  const std::uint64_t outliers = model.n - inliers;
  const double p = model.p;
  const BinomialSampler binomial(model.n);

  std::size_t hits = 0;
  const auto st = static_cast<std::ptrdiff_t>(trials);
#pragma omp parallel for schedule(static) reduction(+ : hits) num_threads(num_threads())
  for (std::ptrdiff_t t = 0; t < st; ++t) {
    RandomStream rng(seed, static_cast<std::uint64_t>(t));
    // Inliers i, j and outlier o. Inlier pairs are always compatible.
    const std::uint64_t c_io = rng.bernoulli(p) ? 1 : 0;
    const std::uint64_t c_jo = rng.bernoulli(p) ? 1 : 0;
    // Outliers k != o compatible with i, then which of those also touch j / o.
    const std::uint64_t a = binomial(rng, outliers - 1, p);
    const std::uint64_t shared_ij = binomial(rng, a, p);
    const std::uint64_t shared_io = binomial(rng, a, p);
    // Inliers other than i, j compatible with o.
    const std::uint64_t inlier_o = binomial(rng, inliers - 2, p);

    const std::uint64_t m_ij = (inliers - 2) + c_io * c_jo + shared_ij;
    const std::uint64_t m_io = c_jo + inlier_o + shared_io;
    if (c_io == 1 && m_io > m_ij) ++hits;
  }
  return summarize(hits, trials);
}

McEstimate mc_ambiguity_sc2_full(const AmbiguityModel& model, std::size_t trials, std::uint64_t seed) {
  check_mc_model(model, trials);
  const std::size_t n = model.n;
  const std::size_t inliers = model.inlier_count();
  const std::size_t outliers = n - inliers;

  std::size_t hits = 0;
  const auto st = static_cast<std::ptrdiff_t>(trials);
#pragma omp parallel for schedule(static) reduction(+ : hits) num_threads(num_threads())
  for (std::ptrdiff_t t = 0; t < st; ++t) {
    RandomStream rng(seed, static_cast<std::uint64_t>(t));
    HardCompat c(n, 1.0);
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t v = u + 1; v < n; ++v) {
        if (v < inliers || rng.bernoulli(model.p)) c.connect(u, v);
      }
    }
    const std::size_t i = rng.below(inliers);
    std::size_t j = rng.below(inliers - 1);
    if (j >= i) ++j;
    const std::size_t o = inliers + rng.below(outliers);
    const std::vector<std::int32_t> row = sc2_row(c, i);
    if (row[o] > row[j]) ++hits;
  }
  return summarize(hits, trials);
}

McEstimate mc_ambiguity_sc(double p_window, std::size_t trials, std::uint64_t seed) {
  if (!(p_window > 0.0 && p_window < 1.0)) throw std::domain_error("p_window must lie in (0, 1)");
  if (trials < 1) throw std::domain_error("Monte Carlo needs at least one trial");
  std::size_t hits = 0;
  const auto st = static_cast<std::ptrdiff_t>(trials);
#pragma omp parallel for schedule(static) reduction(+ : hits) num_threads(num_threads())
  for (std::ptrdiff_t t = 0; t < st; ++t) {
    RandomStream rng(seed, static_cast<std::uint64_t>(t));
    // Lengths in units of d_thr: the inlier difference is uniform on [0, 1];
    // the unrelated difference lands in the window with probability p_window,
    // uniformly inside it, and beyond d_thr otherwise.
    const double d_in_in = rng.uniform();
    const bool in_window = rng.bernoulli(p_window);
    const double d_in_out = in_window ? rng.uniform() : 1.0 + rng.uniform();
    if (d_in_out < d_in_in) ++hits;
  }
  return summarize(hits, trials);
}

}  // namespace sc2pcr::theory
