#pragma once

#include <cstddef>
#include <vector>

#include "sc2pcr/compat.hpp"
#include "sc2pcr/core.hpp"

namespace sc2pcr {

/// Non-negative unit-norm score per correspondence.
struct ConfidenceVector {
  std::vector<double> scores;
  /// Set when the input matrix was zero and a uniform vector was returned.
  bool degenerate = false;
  /// Power iterations performed.
  int iterations = 0;

  std::size_t size() const { return scores.size(); }
  double operator[](std::size_t i) const { return scores[i]; }
};

struct SeedSet {
  std::vector<std::size_t> indices;  ///< descending score, ties by index
  std::vector<double> scores;
  bool degenerate = false;

  std::size_t size() const { return indices.size(); }
};

struct PowerIterationOptions {
  int max_iters = 40;
  double tol = 1e-6;
};

/// Principal eigenvector of a symmetric non-negative matrix by power
/// iteration from the all-ones vector. Stops once successive iterates differ
/// by less than `tol` in the max norm.
ConfidenceVector leading_eigenvector(const SoftCompat& m, PowerIterationOptions opts = {});
ConfidenceVector leading_eigenvector(const SparseRows& m, PowerIterationOptions opts = {});

/// Spatial non-maximum suppression in source coordinates followed by a
/// top-ceil(seed_ratio * N) cut.
///
/// Correspondence i survives when no other j with ||x_j - x_i|| < nms_radius
/// has a strictly larger confidence, so equal-confidence neighbours both
/// survive. Survivors are ranked by descending confidence with ties going to
/// the lower index.
SeedSet select_seeds(const ConfidenceVector& conf, const CorrespondenceSet& corrs, double nms_radius,
                     double seed_ratio);

/// Per-member weights of one consensus set: leading eigenvector of its local
/// soft second-order matrix.
ConfidenceVector spectral_weights(const SoftCompat& local, PowerIterationOptions opts = {});

}  // namespace sc2pcr
