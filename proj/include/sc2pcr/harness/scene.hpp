#pragma once

#include <cstddef>
#include <cstdint>

#include "sc2pcr/core.hpp"
#include "sc2pcr/rng.hpp"

namespace sc2pcr::harness {

struct SceneParams {
  std::size_t n = 1000;
  double inlier_ratio = 0.05;
  double noise_sigma = 0.01;  ///< meters, per axis, on inlier targets
  double box_extent = 10.0;   ///< edge of the cube sources are drawn from, meters
  std::uint64_t seed = 42;
};

/// Planted-inlier instance. Sources are uniform in a cube of edge
/// box_extent centred at the origin. round(N * inlier_ratio) randomly placed
/// indices are inliers with targets R x + t + N(0, sigma^2 I); the remaining
/// targets are uniform in the same cube shifted by t, independent of their
/// sources.
struct SyntheticScene {
  CorrespondenceSet corrs;
  RigidTransform gt_transform;
  InlierMask gt_inliers;
  SceneParams params;
};

/// Uniformly random rotation with translation uniform in [-extent/2, extent/2]^3.
RigidTransform random_transform(RandomStream& rng, double translation_extent);

/// Deterministic from params.seed. Throws std::invalid_argument on invalid params.
SyntheticScene generate_scene(const SceneParams& params);

}  // namespace sc2pcr::harness
