#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sc2pcr/compat.hpp"
#include "sc2pcr/core.hpp"

namespace sc2pcr {

/// Correspondences grown around one seed. `members[0]` is always the seed.
struct ConsensusSet {
  std::size_t seed = 0;
  std::vector<std::size_t> members;
  /// Normalized soft second-order matrix over `members`, in member order.
  SoftCompat local_soft_sc2;
};

/// Seed followed by its `k1` best neighbours in an SC2 row (descending
/// score, ties by ascending index). `k1` is clamped to N - 1.
std::vector<std::size_t> stage1_select(std::span<const std::int32_t> sc2_row, std::size_t seed, std::size_t k1);
std::vector<std::size_t> stage1_select(const SC2Matrix& sc2, std::size_t seed, std::size_t k1);

/// First-order variant of stage 1: neighbours ranked by ascending distance
/// difference d_ij (ties by ascending index).
std::vector<std::size_t> stage1_select_first_order(std::span<const double> dist_row, std::size_t seed,
                                                   std::size_t k1);

/// Rebuilds distance differences, hard compatibility and SC2 over `stage1`
/// only, keeps the seed plus its top (k2 - 1) neighbours by the local SC2 row
/// of the seed, and attaches the local soft matrix of the kept members.
///
/// Throws DegenerateError when `stage1` has fewer than 3 members.
ConsensusSet stage2_refine(const CorrespondenceSet& corrs, std::span<const std::size_t> stage1, std::size_t seed,
                           double d_thr, std::size_t k2);

}  // namespace sc2pcr
