#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

namespace sc2pcr {

/// Raised when the input is well-formed but geometrically or combinatorially
/// unusable (collinear points, no viable hypothesis, ...).
class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Point3 = Eigen::Vector3d;

struct Correspondence {
  Point3 source;
  Point3 target;
};

/// N putative matches (x_i, y_i). Indices are stable for the lifetime of the
/// set; every coordinate is finite. Constructing from an empty list throws.
class CorrespondenceSet {
 public:
  CorrespondenceSet() = default;
  explicit CorrespondenceSet(std::vector<Correspondence> pairs);

  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }

  const Correspondence& operator[](std::size_t i) const { return pairs_[i]; }
  const Point3& source(std::size_t i) const { return pairs_[i].source; }
  const Point3& target(std::size_t i) const { return pairs_[i].target; }

  std::span<const Correspondence> pairs() const { return pairs_; }
  auto begin() const { return pairs_.begin(); }
  auto end() const { return pairs_.end(); }

  /// New set holding pairs_[indices[0]], pairs_[indices[1]], ... in that order.
  CorrespondenceSet subset(std::span<const std::size_t> indices) const;

 private:
  std::vector<Correspondence> pairs_;
};

/// Proper rigid motion x -> R x + t. Orthonormality and det(R) = +1 are
/// checked to 1e-9 on construction.
class RigidTransform {
 public:
  static constexpr double kTolerance = 1e-9;

  RigidTransform() = default;
  RigidTransform(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation);

  static RigidTransform identity() { return {}; }

  const Eigen::Matrix3d& rotation() const { return rotation_; }
  const Eigen::Vector3d& translation() const { return translation_; }

  Point3 operator()(const Point3& p) const { return rotation_ * p + translation_; }

  /// True when R is orthonormal with det +1 within kTolerance.
  static bool is_rotation(const Eigen::Matrix3d& r, double tol = kTolerance);

 private:
  Eigen::Matrix3d rotation_ = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation_ = Eigen::Vector3d::Zero();
};

/// Boolean label per correspondence index.
struct InlierMask {
  std::vector<bool> bits;

  InlierMask() = default;
  explicit InlierMask(std::size_t n, bool value = false) : bits(n, value) {}

  std::size_t size() const { return bits.size(); }
  std::size_t count() const;
  std::vector<std::size_t> indices() const;

  bool operator==(const InlierMask&) const = default;
};

Point3 apply_transform(const RigidTransform& transform, const Point3& p);

/// ||R x + t - y||.
double compose_residual(const RigidTransform& transform, const Correspondence& pair);

/// Geodesic angle (radians) between two rotations. Uses the atan2 form so
/// that angles down to ~1e-15 rad are resolved.
double rotation_angle_between(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b);

/// Rotation by `angle` radians about `axis` (normalized internally).
Eigen::Matrix3d axis_angle(const Eigen::Vector3d& axis, double angle);

}  // namespace sc2pcr
