#pragma once

#include <Eigen/Geometry>

#include "bcreg/geometry.hpp"
#include "bcreg/rng.hpp"

namespace bcreg::test {

inline PointCloud random_cloud(int n, std::uint64_t seed, double extent = 1.0) {
  Rng rng(mix_seed(seed, 0xc10dULL));
  PointCloud c;
  c.points.reserve(n);
  for (int i = 0; i < n; ++i) {
    c.points.emplace_back(rng.uniform(-extent, extent), rng.uniform(-extent, extent),
                          rng.uniform(-extent, extent));
  }
  return c;
}

// Uniform random rotation from a normalized 4-gaussian quaternion;
// independent of the library's transform construction.
inline Eigen::Matrix3d random_rotation(Rng& rng) {
  Eigen::Quaterniond q(rng.gaussian(), rng.gaussian(), rng.gaussian(), rng.gaussian());
  q.normalize();
  return q.toRotationMatrix();
}

inline RigidTransform random_transform(std::uint64_t seed, double t_extent = 1.0) {
  Rng rng(mix_seed(seed, 0x7266ULL));
  RigidTransform t;
  t.rotation = random_rotation(rng);
  t.translation = {rng.uniform(-t_extent, t_extent), rng.uniform(-t_extent, t_extent),
                   rng.uniform(-t_extent, t_extent)};
  return t;
}

}  // namespace bcreg::test
