#include "sc2pcr/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <optional>
#include <stdexcept>

#include "sc2pcr/compat.hpp"
#include "sc2pcr/parallel.hpp"
#include "sc2pcr/sampling.hpp"
#include "sc2pcr/spectral.hpp"

namespace sc2pcr {

void RegistrationConfig::validate() const {
  if (!(d_thr > 0.0) || !std::isfinite(d_thr)) throw std::invalid_argument("d_thr must be positive");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("tau must be positive");
  if (!(seed_ratio > 0.0 && seed_ratio <= 1.0)) throw std::invalid_argument("seed_ratio must lie in (0, 1]");
  if (!(nms_radius >= 0.0)) throw std::invalid_argument("nms_radius must be non-negative");
  if (k1 < 2) throw std::invalid_argument("K1 must be at least 2");
  if (k2 > k1) throw std::invalid_argument("K2 must not exceed K1");
  if (k2 < 1) throw std::invalid_argument("K2 must be at least 1");
  if (power_iters < 1) throw std::invalid_argument("power_iters must be at least 1");
  if (!(power_tol > 0.0)) throw std::invalid_argument("power_tol must be positive");
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Global state shared read-only by every seed branch. Exactly one of the
// dense / streaming members is populated for each quantity in use.
struct GlobalScores {
  std::optional<DistDiffMatrix> dist;
  std::optional<SC2Matrix> sc2;
  std::optional<HardCompat> compat;
};

std::vector<std::size_t> first_stage(const CorrespondenceSet& corrs, const GlobalScores& g, std::size_t seed,
                                     const RegistrationConfig& cfg, NeighborRanking ranking) {
  if (ranking == NeighborRanking::kSecondOrder) {
    if (g.sc2) return stage1_select(*g.sc2, seed, cfg.k1);
    return stage1_select(sc2_row(*g.compat, seed), seed, cfg.k1);
  }
  if (g.dist) return stage1_select_first_order(g.dist->row(seed), seed, cfg.k1);
  std::vector<double> row(corrs.size(), 0.0);
  for (std::size_t j = 0; j < corrs.size(); ++j) {
    const double dx = (corrs.source(seed) - corrs.source(j)).norm();
    const double dy = (corrs.target(seed) - corrs.target(j)).norm();
    row[j] = std::abs(dx - dy);
  }
  return stage1_select_first_order(row, seed, cfg.k1);
}

std::optional<Hypothesis> hypothesis_for_seed(const CorrespondenceSet& corrs, const GlobalScores& g,
                                              std::size_t seed, const RegistrationConfig& cfg,
                                              NeighborRanking ranking) {
  try {
    const std::vector<std::size_t> stage1 = first_stage(corrs, g, seed, cfg, ranking);
    ConsensusSet cs = stage2_refine(corrs, stage1, seed, cfg.d_thr, cfg.k2);
    if (cs.members.size() < 3) return std::nullopt;
    ConfidenceVector w = spectral_weights(cs.local_soft_sc2, {cfg.power_iters, cfg.power_tol});
    const WeightedSvdResult fit = weighted_svd(corrs.subset(cs.members), w.scores);
    const InlierCount count = inlier_count(corrs, fit.transform, cfg.tau);

    Hypothesis h;
    h.transform = fit.transform;
    h.inlier_count = count.count;
    h.mean_residual = count.mean_residual;
    h.seed = seed;
    h.members = std::move(cs.members);
    h.weights = std::move(w);
    h.uniform_fallback = fit.uniform_fallback;
    return h;
  } catch (const DegenerateError&) {
    return std::nullopt;
  }
}

std::vector<Hypothesis> run(const CorrespondenceSet& corrs, const RegistrationConfig& cfg,
                            const RegisterOptions& opts, StageTimings& timings) {
  cfg.validate();
  const std::size_t n = corrs.size();
  if (n < 3) throw std::invalid_argument("registration needs at least 3 correspondences");
  const PowerIterationOptions power{cfg.power_iters, cfg.power_tol};
  const bool streaming = n > opts.streaming_threshold;

  auto t0 = Clock::now();
  GlobalScores g;
  ConfidenceVector conf;
  if (!streaming) {
    DistDiffMatrix dist = distance_difference_matrix(corrs);
    if (opts.ranking == NeighborRanking::kSecondOrder) g.sc2 = sc2_matrix(hard_compatibility(dist, cfg.d_thr));
    {
      const SoftCompat global = soft_sc2(soft_compatibility(dist, cfg.d_thr));
      timings.compatibility_s = seconds_since(t0);
      t0 = Clock::now();
      conf = leading_eigenvector(global, power);
    }
    if (opts.ranking == NeighborRanking::kFirstOrder) g.dist = std::move(dist);
  } else {
    if (opts.ranking == NeighborRanking::kSecondOrder) g.compat = hard_compatibility(corrs, cfg.d_thr);
    const SparseRows global = soft_sc2_rows(corrs, cfg.d_thr);
    timings.compatibility_s = seconds_since(t0);
    t0 = Clock::now();
    conf = leading_eigenvector(global, power);
  }
  const SeedSet seeds = select_seeds(conf, corrs, cfg.nms_radius, cfg.seed_ratio);
  timings.seeding_s = seconds_since(t0);

  t0 = Clock::now();
  std::vector<std::optional<Hypothesis>> slots(seeds.size());
  std::exception_ptr failure;
  const auto sn = static_cast<std::ptrdiff_t>(seeds.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(num_threads())
  for (std::ptrdiff_t s = 0; s < sn; ++s) {
    try {
      slots[static_cast<std::size_t>(s)] =
          hypothesis_for_seed(corrs, g, seeds.indices[static_cast<std::size_t>(s)], cfg, opts.ranking);
    } catch (...) {
#pragma omp critical(sc2pcr_pipeline_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<Hypothesis> hyps;
  hyps.reserve(slots.size());
  for (auto& h : slots) {
    if (h) hyps.push_back(std::move(*h));
  }
  timings.hypotheses_s = seconds_since(t0);
  return hyps;
}

}  // namespace

std::vector<Hypothesis> generate_hypotheses(const CorrespondenceSet& corrs, const RegistrationConfig& cfg,
                                            const RegisterOptions& opts) {
  StageTimings unused;
  return run(corrs, cfg, opts, unused);
}

RegistrationResult register_correspondences(const CorrespondenceSet& corrs, const RegistrationConfig& cfg,
                                            const RegisterOptions& opts) {
  const auto start = Clock::now();
  RegistrationResult result;
  const std::vector<Hypothesis> hyps = run(corrs, cfg, opts, result.timings);
  if (hyps.empty()) throw DegenerateError("no seed produced a viable hypothesis");

  const auto t0 = Clock::now();
  const Hypothesis& best = select_best(hyps);
  result.transform = best.transform;
  result.seed_used = best.seed;
  result.hypotheses_evaluated = hyps.size();
  const InlierCount count = inlier_count(corrs, best.transform, cfg.tau);
  result.inlier_count = count.count;
  result.inlier_mask = count.mask;
  result.timings.selection_s = seconds_since(t0);
  result.timings.total_s = seconds_since(start);
  return result;
}

}  // namespace sc2pcr
