#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "sc2pcr/core.hpp"

namespace sc2pcr {

/// Dense row-major N x N storage for a symmetric matrix. `set` writes both
/// (i, j) and (j, i) so the two halves are bitwise identical.
template <class T>
class DenseSymmetric {
 public:
  DenseSymmetric() = default;
  explicit DenseSymmetric(std::size_t n) : n_(n), data_(n * n, T{}) {}

  std::size_t size() const { return n_; }
  T operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  void set(std::size_t i, std::size_t j, T v) {
    data_[i * n_ + j] = v;
    data_[j * n_ + i] = v;
  }
  std::span<const T> row(std::size_t i) const { return {data_.data() + i * n_, n_}; }
  std::span<T> mutable_row(std::size_t i) { return {data_.data() + i * n_, n_}; }
  std::span<const T> data() const { return data_; }

 private:
  std::size_t n_ = 0;
  std::vector<T> data_;
};

/// d_ij = | ||x_i - x_j|| - ||y_i - y_j|| | in meters.
class DistDiffMatrix : public DenseSymmetric<double> {
 public:
  using DenseSymmetric::DenseSymmetric;
};

/// Integer second-order counts SC2_ij = C_ij * sum_k C_ik C_kj.
class SC2Matrix : public DenseSymmetric<std::int32_t> {
 public:
  using DenseSymmetric::DenseSymmetric;
};

/// Real compatibility matrix in [0, 1] with zero diagonal. Holds both the
/// soft first-order matrix and its normalized second-order product.
class SoftCompat : public DenseSymmetric<double> {
 public:
  using DenseSymmetric::DenseSymmetric;
};

/// Symmetric binary matrix with zero diagonal, rows packed into 64-bit words.
class HardCompat {
 public:
  HardCompat() = default;
  HardCompat(std::size_t n, double d_thr);

  std::size_t size() const { return n_; }
  double d_thr() const { return d_thr_; }
  std::size_t words_per_row() const { return words_; }

  bool operator()(std::size_t i, std::size_t j) const {
    return (bits_[i * words_ + (j >> 6)] >> (j & 63)) & 1u;
  }
  /// Marks (i, j) and (j, i) compatible. Self pairs are ignored.
  void connect(std::size_t i, std::size_t j);
  std::span<const std::uint64_t> row(std::size_t i) const { return {bits_.data() + i * words_, words_}; }
  std::size_t degree(std::size_t i) const;

 private:
  std::size_t n_ = 0;
  std::size_t words_ = 0;
  double d_thr_ = 0.0;
  std::vector<std::uint64_t> bits_;
};

DistDiffMatrix distance_difference_matrix(const CorrespondenceSet& corrs);

/// C_ij = 1 iff d_ij <= d_thr and i != j.
HardCompat hard_compatibility(const DistDiffMatrix& dist, double d_thr);

/// Same bits as hard_compatibility(distance_difference_matrix(corrs), d_thr)
/// without materializing the N x N real matrix.
HardCompat hard_compatibility(const CorrespondenceSet& corrs, double d_thr);

/// Word-packed AND + popcount product, evaluated only where C_ij = 1.
SC2Matrix sc2_matrix(const HardCompat& compat);

/// Row i of sc2_matrix(compat), computed on its own.
std::vector<std::int32_t> sc2_row(const HardCompat& compat, std::size_t i);

/// Streaming form of sc2_matrix: row-by-row, keeping for each i the `k`
/// highest-scoring j != i (descending score, ties by ascending index).
std::vector<std::vector<std::size_t>> sc2_topk_rows(const HardCompat& compat, std::size_t k);

/// ReLU(1 - d_ij^2 / d_thr^2) with the diagonal forced to zero.
SoftCompat soft_compatibility(const DistDiffMatrix& dist, double d_thr);

/// C~ o (C~ x C~). When `normalize` is set and the maximum entry is positive
/// the result is divided by that maximum.
SoftCompat soft_sc2(const SoftCompat& soft, bool normalize = true);

/// Non-zero entries of a symmetric matrix, one ascending-column list per row.
struct SparseRows {
  std::vector<std::vector<std::pair<std::uint32_t, double>>> rows;
  std::size_t size() const { return rows.size(); }
};

/// Normalized soft second-order matrix for large N, built straight from the
/// coordinates. Entry values equal those of
/// soft_sc2(soft_compatibility(distance_difference_matrix(corrs), d_thr)).
SparseRows soft_sc2_rows(const CorrespondenceSet& corrs, double d_thr);

}  // namespace sc2pcr
