#include "sc2pcr/harness/baselines.hpp"

#include <array>
#include <chrono>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "sc2pcr/parallel.hpp"
#include "sc2pcr/rng.hpp"
#include "sc2pcr/solver.hpp"

namespace sc2pcr::harness {

RegistrationResult ransac_register(const CorrespondenceSet& corrs, std::size_t iterations, double tau,
                                   std::uint64_t seed) {
  const std::size_t n = corrs.size();
  if (n < 3) throw std::invalid_argument("RANSAC needs at least 3 correspondences");
  if (iterations < 1) throw std::invalid_argument("RANSAC needs at least one iteration");
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  const auto start = std::chrono::steady_clock::now();

  struct Candidate {
    RigidTransform transform;
    std::size_t count = 0;
  };
  std::vector<std::optional<Candidate>> slots(iterations);
  const auto si = static_cast<std::ptrdiff_t>(iterations);
#pragma omp parallel for schedule(static) num_threads(num_threads())
  for (std::ptrdiff_t it = 0; it < si; ++it) {
    RandomStream rng(seed, static_cast<std::uint64_t>(it));
    std::array<std::size_t, 3> pick{};
    pick[0] = rng.below(n);
    do {
      pick[1] = rng.below(n);
    } while (pick[1] == pick[0]);
    do {
      pick[2] = rng.below(n);
    } while (pick[2] == pick[0] || pick[2] == pick[1]);
    try {
      const RigidTransform fit = weighted_svd(corrs.subset(pick));
      std::size_t count = 0;
      for (std::size_t i = 0; i < n; ++i) count += compose_residual(fit, corrs[i]) < tau ? 1 : 0;
      slots[static_cast<std::size_t>(it)] = Candidate{fit, count};
    } catch (const DegenerateError&) {
    }
  }

  const Candidate* best = nullptr;
  std::size_t evaluated = 0;
  for (const auto& c : slots) {
    if (!c) continue;
    ++evaluated;
    if (best == nullptr || c->count > best->count) best = &*c;
  }
  if (best == nullptr) throw DegenerateError("every RANSAC sample was degenerate");

  RegistrationResult result;
  result.transform = best->transform;
  const InlierCount count = inlier_count(corrs, best->transform, tau);
  result.inlier_count = count.count;
  result.inlier_mask = count.mask;
  result.hypotheses_evaluated = evaluated;
  result.timings.total_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  result.timings.hypotheses_s = result.timings.total_s;
  return result;
}

RegistrationResult sc_guided_register(const CorrespondenceSet& corrs, const RegistrationConfig& cfg) {
  RegisterOptions opts;
  opts.ranking = NeighborRanking::kFirstOrder;
  return register_correspondences(corrs, cfg, opts);
}

}  // namespace sc2pcr::harness
