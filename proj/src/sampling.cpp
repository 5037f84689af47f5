#include "sc2pcr/sampling.hpp"

#include <algorithm>
#include <stdexcept>

namespace sc2pcr {

namespace {

template <class Better>
std::vector<std::size_t> seed_plus_top(std::size_t n, std::size_t seed, std::size_t k, Better better) {
  if (seed >= n) throw std::out_of_range("seed index out of range");
  std::vector<std::size_t> others;
  others.reserve(n - 1);
  for (std::size_t j = 0; j < n; ++j) {
    if (j != seed) others.push_back(j);
  }
  k = std::min(k, others.size());
  std::partial_sort(others.begin(), others.begin() + static_cast<std::ptrdiff_t>(k), others.end(), better);
  std::vector<std::size_t> out;
  out.reserve(k + 1);
  out.push_back(seed);
  out.insert(out.end(), others.begin(), others.begin() + static_cast<std::ptrdiff_t>(k));
  return out;
}

}  // namespace

std::vector<std::size_t> stage1_select(std::span<const std::int32_t> sc2_row, std::size_t seed, std::size_t k1) {
  if (k1 < 1) throw std::invalid_argument("K1 must be at least 1");
  return seed_plus_top(sc2_row.size(), seed, k1, [&](std::size_t a, std::size_t b) {
    return sc2_row[a] != sc2_row[b] ? sc2_row[a] > sc2_row[b] : a < b;
  });
}

std::vector<std::size_t> stage1_select(const SC2Matrix& sc2, std::size_t seed, std::size_t k1) {
  if (seed >= sc2.size()) throw std::out_of_range("seed index out of range");
  return stage1_select(sc2.row(seed), seed, k1);
}

std::vector<std::size_t> stage1_select_first_order(std::span<const double> dist_row, std::size_t seed,
                                                   std::size_t k1) {
  if (k1 < 1) throw std::invalid_argument("K1 must be at least 1");
  return seed_plus_top(dist_row.size(), seed, k1, [&](std::size_t a, std::size_t b) {
    return dist_row[a] != dist_row[b] ? dist_row[a] < dist_row[b] : a < b;
  });
}

ConsensusSet stage2_refine(const CorrespondenceSet& corrs, std::span<const std::size_t> stage1, std::size_t seed,
                           double d_thr, std::size_t k2) {
  if (stage1.size() < 3) throw DegenerateError("consensus set needs at least 3 correspondences");
  if (k2 < 1) throw std::invalid_argument("K2 must be at least 1");
  const auto seed_it = std::find(stage1.begin(), stage1.end(), seed);
  if (seed_it == stage1.end()) throw std::invalid_argument("seed is not part of the stage-1 set");
  const auto seed_local = static_cast<std::size_t>(seed_it - stage1.begin());

  const CorrespondenceSet local = corrs.subset(stage1);
  const DistDiffMatrix dist = distance_difference_matrix(local);
  const SC2Matrix sc2 = sc2_matrix(hard_compatibility(dist, d_thr));
  const auto row = sc2.row(seed_local);

  std::vector<std::size_t> others;
  for (std::size_t a = 0; a < stage1.size(); ++a) {
    if (a != seed_local) others.push_back(a);
  }
  const std::size_t keep = std::min(k2 - 1, others.size());
  std::partial_sort(others.begin(), others.begin() + static_cast<std::ptrdiff_t>(keep), others.end(),
                    [&](std::size_t a, std::size_t b) {
                      return row[a] != row[b] ? row[a] > row[b] : stage1[a] < stage1[b];
                    });

  std::vector<std::size_t> chosen_local{seed_local};
  chosen_local.insert(chosen_local.end(), others.begin(), others.begin() + static_cast<std::ptrdiff_t>(keep));

  ConsensusSet out;
  out.seed = seed;
  out.members.reserve(chosen_local.size());
  for (std::size_t a : chosen_local) out.members.push_back(stage1[a]);

  DistDiffMatrix member_dist(chosen_local.size());
  for (std::size_t a = 0; a < chosen_local.size(); ++a) {
    for (std::size_t b = a + 1; b < chosen_local.size(); ++b) {
      member_dist.set(a, b, dist(chosen_local[a], chosen_local[b]));
    }
  }
  out.local_soft_sc2 = soft_sc2(soft_compatibility(member_dist, d_thr));
  return out;
}

}  // namespace sc2pcr
