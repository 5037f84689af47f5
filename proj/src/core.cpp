#include "sc2pcr/core.hpp"

#include <cmath>
#include <string>

#include <Eigen/Geometry>
#include <Eigen/LU>

namespace sc2pcr {

CorrespondenceSet::CorrespondenceSet(std::vector<Correspondence> pairs) : pairs_(std::move(pairs)) {
  if (pairs_.empty()) throw std::invalid_argument("correspondence set is empty");
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    if (!pairs_[i].source.allFinite() || !pairs_[i].target.allFinite()) {
      throw std::invalid_argument("correspondence " + std::to_string(i) + " has a non-finite coordinate");
    }
  }
}

CorrespondenceSet CorrespondenceSet::subset(std::span<const std::size_t> indices) const {
  std::vector<Correspondence> out;
  out.reserve(indices.size());
  for (std::size_t idx : indices) {
    if (idx >= pairs_.size()) throw std::out_of_range("correspondence index out of range");
    out.push_back(pairs_[idx]);
  }
  CorrespondenceSet s;
  s.pairs_ = std::move(out);
  return s;
}

bool RigidTransform::is_rotation(const Eigen::Matrix3d& r, double tol) {
  if (!r.allFinite()) return false;
  const double ortho = (r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  const double det = r.determinant();
  return ortho <= tol && std::abs(det - 1.0) <= tol;
}

RigidTransform::RigidTransform(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation)
    : rotation_(rotation), translation_(translation) {
  if (!is_rotation(rotation_)) throw std::invalid_argument("rotation is not orthonormal with det +1");
  if (!translation_.allFinite()) throw std::invalid_argument("translation is not finite");
}

std::size_t InlierMask::count() const {
  std::size_t c = 0;
  for (bool b : bits) c += b ? 1 : 0;
  return c;
}

std::vector<std::size_t> InlierMask::indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) out.push_back(i);
  }
  return out;
}

Point3 apply_transform(const RigidTransform& transform, const Point3& p) { return transform(p); }

double compose_residual(const RigidTransform& transform, const Correspondence& pair) {
  return (transform(pair.source) - pair.target).norm();
}

double rotation_angle_between(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b) {
  const Eigen::Matrix3d r = b.transpose() * a;
  const Eigen::Vector3d s(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
  return std::atan2(0.5 * s.norm(), 0.5 * (r.trace() - 1.0));
}

Eigen::Matrix3d axis_angle(const Eigen::Vector3d& axis, double angle) {
  return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

}  // namespace sc2pcr
