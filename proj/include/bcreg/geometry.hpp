#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace bcreg {

struct PointCloud {
  std::vector<Eigen::Vector3d> points;
  std::string id;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }

  Eigen::Vector3d centroid() const;
};

// Rotation is orthonormal with det +1 (see is_rotation); translation in the
// same units as the cloud it applies to.
struct RigidTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Eigen::Vector3d apply(const Eigen::Vector3d& p) const {
    return rotation * p + translation;
  }
};

// Maps a cloud into the [-2, 2] box: q = (p - offset) * scale. One uniform
// scale for all axes so the mapping commutes with rotations.
struct NormalizationRecord {
  double scale = 1.0;
  Eigen::Vector3d offset = Eigen::Vector3d::Zero();

  Eigen::Vector3d normalize(const Eigen::Vector3d& p) const {
    return (p - offset) * scale;
  }
  Eigen::Vector3d denormalize(const Eigen::Vector3d& q) const {
    return q / scale + offset;
  }
};

enum class Axis { kX = 0, kY = 1, kZ = 2 };

struct AxisSet {
  bool x = false;
  bool y = false;
  bool z = false;

  static AxisSet z_only() { return {false, false, true}; }
  static AxisSet xyz() { return {true, true, true}; }
  bool empty() const { return !x && !y && !z; }
};

bool is_rotation(const Eigen::Matrix3d& r, double tol = 1e-9);

PointCloud apply_transform(const RigidTransform& t, const PointCloud& c);

RigidTransform compose(const RigidTransform& outer, const RigidTransform& inner);
RigidTransform inverse(const RigidTransform& t);

// Angle in degrees between two rotations: arccos((tr(R_gt^T R_pred) - 1) / 2),
// clamped to [-1, 1]. Evaluated through the identity
// cos(theta) = 1 - |R_gt^T R_pred - I|_F^2 / 4, which does not lose the
// small-angle range to cancellation in the trace.
double rotation_error_deg(const Eigen::Matrix3d& r_gt, const Eigen::Matrix3d& r_pred);

double translation_error(const Eigen::Vector3d& t_gt, const Eigen::Vector3d& t_pred);

// Centers the cloud on its centroid and scales it uniformly so every axis
// lies in [-2, 2]. Throws std::invalid_argument on zero extent.
std::pair<PointCloud, NormalizationRecord> normalize_to_box(const PointCloud& c);

PointCloud denormalize(const PointCloud& c, const NormalizationRecord& rec);

Eigen::Matrix3d axis_rotation(Axis axis, double angle_deg);

// Per-axis rotations composed in x -> y -> z order (x applied first).
// exact_angles = true uses exactly angle_deg on every axis in the set;
// otherwise each angle is drawn uniformly from [-angle_deg, +angle_deg].
// Translation is zero. Deterministic for a fixed seed.
RigidTransform random_rigid_transform(double angle_deg, const AxisSet& axes,
                                      std::uint64_t seed, bool exact_angles = false);

inline constexpr double kDegToRad = M_PI / 180.0;
inline constexpr double kRadToDeg = 180.0 / M_PI;

}  // namespace bcreg
