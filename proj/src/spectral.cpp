#include "sc2pcr/spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>

#include "sc2pcr/parallel.hpp"

namespace sc2pcr {

namespace {

template <class MatVec>
ConfidenceVector power_iterate(std::size_t n, const MatVec& multiply, PowerIterationOptions opts) {
  if (n == 0) throw std::invalid_argument("leading_eigenvector of an empty matrix");
  ConfidenceVector out;
  std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> next(n);
  for (int it = 0; it < opts.max_iters; ++it) {
    multiply(v, next);
    double norm2 = 0.0;
    for (double x : next) norm2 += x * x;
    if (!(norm2 > 0.0)) {
      out.scores.assign(n, 1.0 / std::sqrt(static_cast<double>(n)));
      out.degenerate = true;
      out.iterations = it + 1;
      return out;
    }
    const double inv = 1.0 / std::sqrt(norm2);
    double delta = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      next[i] *= inv;
      delta = std::max(delta, std::abs(next[i] - v[i]));
    }
    v.swap(next);
    out.iterations = it + 1;
    if (delta < opts.tol) break;
  }
  out.scores = std::move(v);
  return out;
}

}  // namespace

ConfidenceVector leading_eigenvector(const SoftCompat& m, PowerIterationOptions opts) {
  const std::size_t n = m.size();
  return power_iterate(
      n,
      [&](const std::vector<double>& v, std::vector<double>& y) {
        const auto sn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) num_threads(num_threads())
        for (std::ptrdiff_t si = 0; si < sn; ++si) {
          const auto row = m.row(static_cast<std::size_t>(si));
          double s = 0.0;
          for (std::size_t j = 0; j < n; ++j) s += row[j] * v[j];
          y[static_cast<std::size_t>(si)] = s;
        }
      },
      opts);
}

ConfidenceVector leading_eigenvector(const SparseRows& m, PowerIterationOptions opts) {
  const std::size_t n = m.size();
  return power_iterate(
      n,
      [&](const std::vector<double>& v, std::vector<double>& y) {
        const auto sn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) num_threads(num_threads())
        for (std::ptrdiff_t si = 0; si < sn; ++si) {
          double s = 0.0;
          for (const auto& [j, val] : m.rows[static_cast<std::size_t>(si)]) s += val * v[j];
          y[static_cast<std::size_t>(si)] = s;
        }
      },
      opts);
}

SeedSet select_seeds(const ConfidenceVector& conf, const CorrespondenceSet& corrs, double nms_radius,
                     double seed_ratio) {
  const std::size_t n = corrs.size();
  if (conf.size() != n) throw std::invalid_argument("confidence vector size does not match correspondences");
  if (!(seed_ratio > 0.0 && seed_ratio <= 1.0)) throw std::invalid_argument("seed_ratio must lie in (0, 1]");
  if (!(nms_radius >= 0.0)) throw std::invalid_argument("nms_radius must be non-negative");

  std::vector<char> keep(n, 1);
  if (nms_radius > 0.0 && std::isfinite(nms_radius)) {
    using Cell = std::array<std::int64_t, 3>;
    auto cell_of = [&](const Point3& p) {
      return Cell{static_cast<std::int64_t>(std::floor(p.x() / nms_radius)),
                  static_cast<std::int64_t>(std::floor(p.y() / nms_radius)),
                  static_cast<std::int64_t>(std::floor(p.z() / nms_radius))};
    };
    struct CellHash {
      std::size_t operator()(const Cell& c) const {
        std::uint64_t h = 1469598103934665603ull;
        for (auto v : c) h = (h ^ static_cast<std::uint64_t>(v)) * 1099511628211ull;
        return static_cast<std::size_t>(h);
      }
    };
    std::unordered_map<Cell, std::vector<std::size_t>, CellHash> grid;
    for (std::size_t i = 0; i < n; ++i) grid[cell_of(corrs.source(i))].push_back(i);

    const double r2 = nms_radius * nms_radius;
    for (std::size_t i = 0; i < n; ++i) {
      const Cell c = cell_of(corrs.source(i));
      for (std::int64_t dx = -1; dx <= 1 && keep[i]; ++dx) {
        for (std::int64_t dy = -1; dy <= 1 && keep[i]; ++dy) {
          for (std::int64_t dz = -1; dz <= 1 && keep[i]; ++dz) {
            const auto it = grid.find(Cell{c[0] + dx, c[1] + dy, c[2] + dz});
            if (it == grid.end()) continue;
            for (std::size_t j : it->second) {
              if (j != i && conf[j] > conf[i] && (corrs.source(j) - corrs.source(i)).squaredNorm() < r2) {
                keep[i] = 0;
                break;
              }
            }
          }
        }
      }
    }
  } else if (std::isinf(nms_radius)) {
    const double best = *std::max_element(conf.scores.begin(), conf.scores.end());
    for (std::size_t i = 0; i < n; ++i) keep[i] = conf[i] >= best;
  }

  std::vector<std::size_t> survivors;
  for (std::size_t i = 0; i < n; ++i) {
    if (keep[i]) survivors.push_back(i);
  }
  std::stable_sort(survivors.begin(), survivors.end(),
                   [&](std::size_t a, std::size_t b) { return conf[a] > conf[b]; });

  // Guard against 0.2 * N landing a hair above an integer.
  const auto limit = static_cast<std::size_t>(
      std::max(1.0, std::ceil(seed_ratio * static_cast<double>(n) - 1e-9)));
  if (survivors.size() > limit) survivors.resize(limit);

  SeedSet seeds;
  seeds.degenerate = conf.degenerate;
  seeds.indices = std::move(survivors);
  seeds.scores.reserve(seeds.indices.size());
  for (std::size_t i : seeds.indices) seeds.scores.push_back(conf[i]);
  return seeds;
}

ConfidenceVector spectral_weights(const SoftCompat& local, PowerIterationOptions opts) {
  if (local.size() == 1) {
    ConfidenceVector one;
    one.scores = {1.0};
    return one;
  }
  return leading_eigenvector(local, opts);
}

}  // namespace sc2pcr
