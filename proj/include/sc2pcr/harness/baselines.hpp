#pragma once

#include <cstddef>
#include <cstdint>

#include "sc2pcr/core.hpp"
#include "sc2pcr/pipeline.hpp"

namespace sc2pcr::harness {

/// Classic hypothesize-and-verify: each iteration fits a 3-point Kabsch to
/// three distinct uniformly drawn correspondences and scores it by inlier
/// count. Iteration k draws from its own random stream, so the result does
/// not depend on the thread count. Ties go to the earliest iteration.
RegistrationResult ransac_register(const CorrespondenceSet& corrs, std::size_t iterations, double tau,
                                   std::uint64_t seed);

/// Full pipeline with stage-1 neighbours ranked by first-order compatibility
/// (smallest distance difference) instead of SC2.
RegistrationResult sc_guided_register(const CorrespondenceSet& corrs, const RegistrationConfig& cfg);

}  // namespace sc2pcr::harness
