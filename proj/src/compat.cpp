#include "sc2pcr/compat.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "sc2pcr/parallel.hpp"

namespace sc2pcr {

namespace {

inline double pair_distance_difference(const CorrespondenceSet& corrs, std::size_t i, std::size_t j) {
  const double dx = (corrs.source(i) - corrs.source(j)).norm();
  const double dy = (corrs.target(i) - corrs.target(j)).norm();
  return std::abs(dx - dy);
}

inline double soft_kernel(double d, double d_thr) {
  return std::max(0.0, 1.0 - (d * d) / (d_thr * d_thr));
}

void check_threshold(double d_thr) {
  if (!(d_thr > 0.0) || !std::isfinite(d_thr)) throw std::invalid_argument("d_thr must be positive and finite");
}

inline std::int32_t and_popcount(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  std::int32_t c = 0;
  for (std::size_t w = 0; w < a.size(); ++w) c += std::popcount(a[w] & b[w]);
  return c;
}

// Sum over k ascending of a_k * b_k for two ascending sparse rows. Skipped
// zero terms contribute +0, so the result matches a dense left-to-right sum.
inline double sparse_dot(std::span<const std::pair<std::uint32_t, double>> a,
                         std::span<const std::pair<std::uint32_t, double>> b) {
  double s = 0.0;
  std::size_t p = 0, q = 0;
  while (p < a.size() && q < b.size()) {
    if (a[p].first < b[q].first) {
      ++p;
    } else if (b[q].first < a[p].first) {
      ++q;
    } else {
      s += a[p].second * b[q].second;
      ++p;
      ++q;
    }
  }
  return s;
}

std::vector<std::size_t> topk_indices(std::span<const std::int32_t> scores, std::size_t self, std::size_t k) {
  std::vector<std::size_t> idx;
  idx.reserve(scores.size());
  for (std::size_t j = 0; j < scores.size(); ++j) {
    if (j != self) idx.push_back(j);
  }
  k = std::min(k, idx.size());
  auto better = [&](std::size_t a, std::size_t b) {
    return scores[a] != scores[b] ? scores[a] > scores[b] : a < b;
  };
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(), better);
  idx.resize(k);
  return idx;
}

}  // namespace

HardCompat::HardCompat(std::size_t n, double d_thr)
    : n_(n), words_((n + 63) / 64), d_thr_(d_thr), bits_(n * ((n + 63) / 64), 0) {}

void HardCompat::connect(std::size_t i, std::size_t j) {
  if (i >= n_ || j >= n_) throw std::out_of_range("HardCompat index out of range");
  if (i == j) return;
  bits_[i * words_ + (j >> 6)] |= std::uint64_t{1} << (j & 63);
  bits_[j * words_ + (i >> 6)] |= std::uint64_t{1} << (i & 63);
}

std::size_t HardCompat::degree(std::size_t i) const {
  std::size_t d = 0;
  for (std::uint64_t w : row(i)) d += static_cast<std::size_t>(std::popcount(w));
  return d;
}

DistDiffMatrix distance_difference_matrix(const CorrespondenceSet& corrs) {
  const std::size_t n = corrs.size();
  if (n < 2) throw std::invalid_argument("distance_difference_matrix needs at least 2 correspondences");
  DistDiffMatrix d(n);
  const auto sn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 16) num_threads(num_threads())
  for (std::ptrdiff_t si = 0; si < sn; ++si) {
    const auto i = static_cast<std::size_t>(si);
    for (std::size_t j = i + 1; j < n; ++j) d.set(i, j, pair_distance_difference(corrs, i, j));
  }
  return d;
}

HardCompat hard_compatibility(const DistDiffMatrix& dist, double d_thr) {
  check_threshold(d_thr);
  const std::size_t n = dist.size();
  HardCompat c(n, d_thr);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = dist.row(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      if (row[j] <= d_thr) c.connect(i, j);
    }
  }
  return c;
}

HardCompat hard_compatibility(const CorrespondenceSet& corrs, double d_thr) {
  check_threshold(d_thr);
  const std::size_t n = corrs.size();
  HardCompat c(n, d_thr);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (pair_distance_difference(corrs, i, j) <= d_thr) c.connect(i, j);
    }
  }
  return c;
}

SC2Matrix sc2_matrix(const HardCompat& compat) {
  const std::size_t n = compat.size();
  SC2Matrix out(n);
  const auto sn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 8) num_threads(num_threads())
  for (std::ptrdiff_t si = 0; si < sn; ++si) {
    const auto i = static_cast<std::size_t>(si);
    const auto ri = compat.row(i);
    // Only compatible pairs carry a non-zero count; walk the set bits of row i.
    for (std::size_t w = (i + 1) >> 6; w < ri.size(); ++w) {
      std::uint64_t word = ri[w];
      if (w == (i + 1) >> 6) word &= ~std::uint64_t{0} << ((i + 1) & 63);
      while (word) {
        const std::size_t j = w * 64 + static_cast<std::size_t>(std::countr_zero(word));
        word &= word - 1;
        out.set(i, j, and_popcount(ri, compat.row(j)));
      }
    }
  }
  return out;
}

std::vector<std::int32_t> sc2_row(const HardCompat& compat, std::size_t i) {
  if (i >= compat.size()) throw std::out_of_range("sc2_row index out of range");
  std::vector<std::int32_t> out(compat.size(), 0);
  const auto ri = compat.row(i);
  for (std::size_t w = 0; w < ri.size(); ++w) {
    std::uint64_t word = ri[w];
    while (word) {
      const std::size_t j = w * 64 + static_cast<std::size_t>(std::countr_zero(word));
      word &= word - 1;
      out[j] = and_popcount(ri, compat.row(j));
    }
  }
  return out;
}

std::vector<std::vector<std::size_t>> sc2_topk_rows(const HardCompat& compat, std::size_t k) {
  const std::size_t n = compat.size();
  std::vector<std::vector<std::size_t>> out(n);
  const auto sn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 8) num_threads(num_threads())
  for (std::ptrdiff_t si = 0; si < sn; ++si) {
    const auto i = static_cast<std::size_t>(si);
    const auto row = sc2_row(compat, i);
    out[i] = topk_indices(row, i, k);
  }
  return out;
}

SoftCompat soft_compatibility(const DistDiffMatrix& dist, double d_thr) {
  check_threshold(d_thr);
  const std::size_t n = dist.size();
  SoftCompat s(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = dist.row(i);
    for (std::size_t j = i + 1; j < n; ++j) s.set(i, j, soft_kernel(row[j], d_thr));
  }
  return s;
}

namespace {

using Row = std::vector<std::pair<std::uint32_t, double>>;

// Hadamard of the soft matrix with its square, evaluated on the non-zero
// pattern only. `rows` holds the ascending non-zeros of C~. Each entry is
// computed once for i < j and mirrored.
SparseRows sparse_second_order(const std::vector<Row>& rows, bool normalize) {
  const std::size_t n = rows.size();
  std::vector<Row> upper(n);
  const auto sn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 8) num_threads(num_threads())
  for (std::ptrdiff_t si = 0; si < sn; ++si) {
    const auto i = static_cast<std::size_t>(si);
    for (const auto& [j, cij] : rows[i]) {
      if (j <= i) continue;
      const double v = cij * sparse_dot(rows[i], rows[j]);
      if (v > 0.0) upper[i].emplace_back(j, v);
    }
  }
  if (normalize) {
    double mx = 0.0;
    for (const auto& r : upper) {
      for (const auto& e : r) mx = std::max(mx, e.second);
    }
    if (mx > 0.0) {
      for (auto& r : upper) {
        for (auto& e : r) e.second /= mx;
      }
    }
  }
  SparseRows out;
  out.rows.resize(n);
  // Lower-triangle entries of row j arrive in ascending i before its own
  // upper entries, so every row stays sorted.
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& [j, v] : upper[i]) {
      out.rows[i].emplace_back(j, v);
      out.rows[j].emplace_back(static_cast<std::uint32_t>(i), v);
    }
  }
  return out;
}

}  // namespace

SoftCompat soft_sc2(const SoftCompat& soft, bool normalize) {
  const std::size_t n = soft.size();
  std::vector<Row> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = soft.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (r[j] != 0.0) rows[i].emplace_back(static_cast<std::uint32_t>(j), r[j]);
    }
  }
  const SparseRows prod = sparse_second_order(rows, normalize);
  SoftCompat out(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& [j, v] : prod.rows[i]) {
      if (j > i) out.set(i, j, v);
    }
  }
  return out;
}

SparseRows soft_sc2_rows(const CorrespondenceSet& corrs, double d_thr) {
  check_threshold(d_thr);
  const std::size_t n = corrs.size();
  std::vector<Row> rows(n);
  const auto sn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 16) num_threads(num_threads())
  for (std::ptrdiff_t si = 0; si < sn; ++si) {
    const auto i = static_cast<std::size_t>(si);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double v = soft_kernel(pair_distance_difference(corrs, i, j), d_thr);
      if (v != 0.0) rows[i].emplace_back(static_cast<std::uint32_t>(j), v);
    }
  }
  return sparse_second_order(rows, true);
}

}  // namespace sc2pcr
