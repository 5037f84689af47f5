#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sc2pcr/core.hpp"
#include "sc2pcr/spectral.hpp"

namespace sc2pcr {

/// Candidate transform produced from one seed.
struct Hypothesis {
  RigidTransform transform;
  std::size_t inlier_count = 0;
  /// Mean residual over the counted inliers (infinity when there are none).
  double mean_residual = 0.0;
  std::size_t seed = 0;
  std::vector<std::size_t> members;
  ConfidenceVector weights;
  /// Weights summed to zero and uniform weights were used instead.
  bool uniform_fallback = false;
};

struct WeightedSvdResult {
  RigidTransform transform;
  bool uniform_fallback = false;
};

/// Weighted least-squares rigid alignment (weighted Kabsch): minimizes
/// sum_i w_i ||R x_i + t - y_i||^2 over proper rotations.
///
/// Throws std::invalid_argument for fewer than 3 pairs or negative/non-finite
/// weights, and DegenerateError when the weighted cross-covariance has rank
/// <= 1 (collinear or coincident points).
WeightedSvdResult weighted_svd(const CorrespondenceSet& corrs, std::span<const double> weights);
RigidTransform weighted_svd(const CorrespondenceSet& corrs);

struct InlierCount {
  std::size_t count = 0;
  InlierMask mask;
  double mean_residual = 0.0;
};

/// Counts correspondences with ||R x_i + t - y_i|| < tau (strict).
InlierCount inlier_count(const CorrespondenceSet& corrs, const RigidTransform& transform, double tau);

/// Highest inlier count; ties go to the smaller mean residual, then to the
/// lower seed index.
const Hypothesis& select_best(std::span<const Hypothesis> hyps);

}  // namespace sc2pcr
