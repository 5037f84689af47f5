#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sc2pcr/core.hpp"
#include "sc2pcr/solver.hpp"

namespace sc2pcr {

struct RegistrationConfig {
  double d_thr = 0.1;       ///< compatibility threshold, meters
  double tau = 0.1;         ///< inlier residual threshold, meters
  double seed_ratio = 0.2;  ///< seeds kept, as a fraction of N
  double nms_radius = 0.1;  ///< seed suppression radius in source space, meters
  std::size_t k1 = 30;
  std::size_t k2 = 20;
  int power_iters = 40;
  double power_tol = 1e-6;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

/// How stage-1 neighbours of a seed are ranked.
enum class NeighborRanking {
  kSecondOrder,  ///< descending SC2 score
  kFirstOrder,   ///< ascending distance difference d_ij
};

struct StageTimings {
  double compatibility_s = 0.0;
  double seeding_s = 0.0;
  double hypotheses_s = 0.0;
  double selection_s = 0.0;
  double total_s = 0.0;
};

struct RegistrationResult {
  RigidTransform transform;
  std::size_t inlier_count = 0;
  InlierMask inlier_mask;
  std::size_t seed_used = 0;
  std::size_t hypotheses_evaluated = 0;
  StageTimings timings;
};

struct RegisterOptions {
  NeighborRanking ranking = NeighborRanking::kSecondOrder;
  /// Above this N the full SC2 and soft matrices are not materialized; SC2
  /// rows are computed per seed and the soft matrix is kept row-compressed.
  std::size_t streaming_threshold = 8000;
};

/// Full robust registration: compatibility matrices, spectral seeding,
/// two-stage consensus sampling, locally weighted SVD per seed and
/// inlier-count selection.
///
/// Throws std::invalid_argument for N < 3 or an invalid config and
/// DegenerateError when no seed yields a hypothesis.
RegistrationResult register_correspondences(const CorrespondenceSet& corrs, const RegistrationConfig& cfg,
                                            const RegisterOptions& opts = {});

/// Every per-seed hypothesis of a registration run, in seed order. Exposed
/// for diagnostics and tests.
std::vector<Hypothesis> generate_hypotheses(const CorrespondenceSet& corrs, const RegistrationConfig& cfg,
                                            const RegisterOptions& opts = {});

}  // namespace sc2pcr
