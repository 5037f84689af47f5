#include "sc2pcr/harness/scene.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <Eigen/Geometry>

namespace sc2pcr::harness {

namespace {

// Draws are sequenced explicitly: argument evaluation order is unspecified.
Eigen::Vector3d uniform_in_cube(RandomStream& rng, double half) {
  const double x = rng.uniform(-half, half);
  const double y = rng.uniform(-half, half);
  const double z = rng.uniform(-half, half);
  return {x, y, z};
}

Eigen::Vector3d standard_normal3(RandomStream& rng) {
  const double x = rng.normal();
  const double y = rng.normal();
  const double z = rng.normal();
  return {x, y, z};
}

}  // namespace

RigidTransform random_transform(RandomStream& rng, double translation_extent) {
  Eigen::Quaterniond q;
  do {
    const double w = rng.normal();
    const Eigen::Vector3d v = standard_normal3(rng);
    q = Eigen::Quaterniond(w, v.x(), v.y(), v.z());
  } while (q.norm() < 1e-6);
  q.normalize();
  const Eigen::Vector3d t = uniform_in_cube(rng, translation_extent / 2.0);
  return {q.toRotationMatrix(), t};
}

SyntheticScene generate_scene(const SceneParams& params) {
  if (params.n < 3) throw std::invalid_argument("scene needs N >= 3");
  if (!(params.inlier_ratio > 0.0 && params.inlier_ratio <= 1.0)) {
    throw std::invalid_argument("inlier_ratio must lie in (0, 1]");
  }
  if (!(params.noise_sigma >= 0.0) || !std::isfinite(params.noise_sigma)) {
    throw std::invalid_argument("noise sigma must be finite and >= 0");
  }
  if (!(params.box_extent > 0.0) || !std::isfinite(params.box_extent)) {
    throw std::invalid_argument("box extent must be positive");
  }

  RandomStream rng(params.seed, 0);
  SyntheticScene scene;
  scene.params = params;
  scene.gt_transform = random_transform(rng, params.box_extent);

  const std::size_t n = params.n;
  const auto n_inliers = static_cast<std::size_t>(std::llround(static_cast<double>(n) * params.inlier_ratio));

  // Partial Fisher-Yates: the first n_inliers entries become the inlier set.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i < n_inliers; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(order[i], order[j]);
  }
  scene.gt_inliers = InlierMask(n);
  for (std::size_t i = 0; i < n_inliers; ++i) scene.gt_inliers.bits[order[i]] = true;

  const double h = params.box_extent / 2.0;
  const Eigen::Vector3d& t = scene.gt_transform.translation();
  std::vector<Correspondence> pairs(n);
  for (std::size_t i = 0; i < n; ++i) {
    Correspondence& c = pairs[i];
    c.source = uniform_in_cube(rng, h);
    if (scene.gt_inliers.bits[i]) {
      c.target = scene.gt_transform(c.source) + params.noise_sigma * standard_normal3(rng);
    } else {
      c.target = t + uniform_in_cube(rng, h);
    }
  }
  scene.corrs = CorrespondenceSet(std::move(pairs));
  return scene;
}

}  // namespace sc2pcr::harness
