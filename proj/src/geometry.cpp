#include "bcreg/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/LU>

#include "bcreg/rng.hpp"

namespace bcreg {

Eigen::Vector3d PointCloud::centroid() const {
  Eigen::Vector3d c = Eigen::Vector3d::Zero();
  for (const auto& p : points) c += p;
  return points.empty() ? c : Eigen::Vector3d(c / static_cast<double>(points.size()));
}

bool is_rotation(const Eigen::Matrix3d& r, double tol) {
  const double ortho = (r.transpose() * r - Eigen::Matrix3d::Identity()).norm();
  return ortho <= tol && std::abs(r.determinant() - 1.0) <= tol;
}

PointCloud apply_transform(const RigidTransform& t, const PointCloud& c) {
  PointCloud out;
  out.id = c.id;
  out.points.reserve(c.points.size());
  for (const auto& p : c.points) out.points.push_back(t.apply(p));
  return out;
}

RigidTransform compose(const RigidTransform& outer, const RigidTransform& inner) {
  RigidTransform t;
  t.rotation = outer.rotation * inner.rotation;
  t.translation = outer.rotation * inner.translation + outer.translation;
  return t;
}

RigidTransform inverse(const RigidTransform& t) {
  RigidTransform inv;
  inv.rotation = t.rotation.transpose();
  inv.translation = -(inv.rotation * t.translation);
  return inv;
}

double rotation_error_deg(const Eigen::Matrix3d& r_gt, const Eigen::Matrix3d& r_pred) {
  const Eigen::Matrix3d m = r_gt.transpose() * r_pred - Eigen::Matrix3d::Identity();
  const double cos_theta = std::clamp(1.0 - m.squaredNorm() / 4.0, -1.0, 1.0);
  return std::acos(cos_theta) * kRadToDeg;
}

double translation_error(const Eigen::Vector3d& t_gt, const Eigen::Vector3d& t_pred) {
  return (t_pred - t_gt).norm();
}

std::pair<PointCloud, NormalizationRecord> normalize_to_box(const PointCloud& c) {
  if (c.empty()) throw std::invalid_argument("normalize_to_box: empty cloud");
  const Eigen::Vector3d center = c.centroid();
  double half_extent = 0.0;
  for (const auto& p : c.points) {
    half_extent = std::max(half_extent, (p - center).cwiseAbs().maxCoeff());
  }
  if (half_extent <= 0.0) {
    throw std::invalid_argument("normalize_to_box: degenerate cloud with zero extent");
  }
  NormalizationRecord rec;
  rec.offset = center;
  rec.scale = 2.0 / half_extent;
  PointCloud out;
  out.id = c.id;
  out.points.reserve(c.size());
  for (const auto& p : c.points) out.points.push_back(rec.normalize(p));
  return {std::move(out), rec};
}

PointCloud denormalize(const PointCloud& c, const NormalizationRecord& rec) {
  PointCloud out;
  out.id = c.id;
  out.points.reserve(c.size());
  for (const auto& p : c.points) out.points.push_back(rec.denormalize(p));
  return out;
}

Eigen::Matrix3d axis_rotation(Axis axis, double angle_deg) {
  const double a = angle_deg * kDegToRad;
  const double c = std::cos(a);
  const double s = std::sin(a);
  Eigen::Matrix3d r = Eigen::Matrix3d::Identity();
  switch (axis) {
    case Axis::kX:
      r(1, 1) = c; r(1, 2) = -s;
      r(2, 1) = s; r(2, 2) = c;
      break;
    case Axis::kY:
      r(0, 0) = c; r(0, 2) = s;
      r(2, 0) = -s; r(2, 2) = c;
      break;
    case Axis::kZ:
      r(0, 0) = c; r(0, 1) = -s;
      r(1, 0) = s; r(1, 1) = c;
      break;
  }
  return r;
}

RigidTransform random_rigid_transform(double angle_deg, const AxisSet& axes,
                                      std::uint64_t seed, bool exact_angles) {
  if (angle_deg < 0.0 || angle_deg > 180.0) {
    throw std::invalid_argument("random_rigid_transform: angle must be in [0, 180]");
  }
  if (axes.empty()) {
    throw std::invalid_argument("random_rigid_transform: empty axis set");
  }
  Rng rng(mix_seed(seed, 0x726f7461ULL));
  Eigen::Matrix3d r = Eigen::Matrix3d::Identity();
  const bool enabled[3] = {axes.x, axes.y, axes.z};
  for (int i = 0; i < 3; ++i) {
    if (!enabled[i]) continue;
    const double a = exact_angles ? angle_deg : rng.uniform(-angle_deg, angle_deg);
    r = axis_rotation(static_cast<Axis>(i), a) * r;
  }
  RigidTransform t;
  t.rotation = r;
  return t;
}

}  // namespace bcreg
