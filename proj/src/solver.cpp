#include "sc2pcr/solver.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/LU>
#include <Eigen/SVD>

namespace sc2pcr {

WeightedSvdResult weighted_svd(const CorrespondenceSet& corrs, std::span<const double> weights) {
  const std::size_t n = corrs.size();
  if (n < 3) throw std::invalid_argument("weighted_svd needs at least 3 correspondences");
  if (weights.size() != n) throw std::invalid_argument("weight count does not match correspondences");

  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("weights must be finite and non-negative");
    total += w;
  }
  WeightedSvdResult out;
  std::vector<double> w(weights.begin(), weights.end());
  if (!(total > 0.0)) {
    w.assign(n, 1.0);
    total = static_cast<double>(n);
    out.uniform_fallback = true;
  }

  Eigen::Vector3d src_mean = Eigen::Vector3d::Zero();
  Eigen::Vector3d dst_mean = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    src_mean += w[i] * corrs.source(i);
    dst_mean += w[i] * corrs.target(i);
  }
  src_mean /= total;
  dst_mean /= total;

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    cov += w[i] * (corrs.source(i) - src_mean) * (corrs.target(i) - dst_mean).transpose();
  }

  const Eigen::JacobiSVD<Eigen::Matrix3d> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector3d sv = svd.singularValues();
  if (!(sv(0) > 0.0) || sv(1) <= sv(0) * 1e-12) {
    throw DegenerateError("weighted cross-covariance has rank <= 1 (collinear points)");
  }
  const Eigen::Matrix3d& u = svd.matrixU();
  const Eigen::Matrix3d& v = svd.matrixV();
  Eigen::Matrix3d fix = Eigen::Matrix3d::Identity();
  fix(2, 2) = (v * u.transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  const Eigen::Matrix3d rot = v * fix * u.transpose();
  out.transform = RigidTransform(rot, dst_mean - rot * src_mean);
  return out;
}

RigidTransform weighted_svd(const CorrespondenceSet& corrs) {
  const std::vector<double> ones(corrs.size(), 1.0);
  return weighted_svd(corrs, ones).transform;
}

InlierCount inlier_count(const CorrespondenceSet& corrs, const RigidTransform& transform, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  InlierCount out;
  out.mask = InlierMask(corrs.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < corrs.size(); ++i) {
    const double r = compose_residual(transform, corrs[i]);
    if (r < tau) {
      out.mask.bits[i] = true;
      ++out.count;
      sum += r;
    }
  }
  out.mean_residual =
      out.count > 0 ? sum / static_cast<double>(out.count) : std::numeric_limits<double>::infinity();
  return out;
}

const Hypothesis& select_best(std::span<const Hypothesis> hyps) {
  if (hyps.empty()) throw std::invalid_argument("select_best on an empty hypothesis list");
  const Hypothesis* best = &hyps.front();
  for (const Hypothesis& h : hyps.subspan(1)) {
    if (h.inlier_count != best->inlier_count) {
      if (h.inlier_count > best->inlier_count) best = &h;
    } else if (h.mean_residual != best->mean_residual) {
      if (h.mean_residual < best->mean_residual) best = &h;
    } else if (h.seed < best->seed) {
      best = &h;
    }
  }
  return *best;
}

}  // namespace sc2pcr
