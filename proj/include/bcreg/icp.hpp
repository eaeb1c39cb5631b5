#pragma once

#include "bcreg/geometry.hpp"
#include "bcreg/registration.hpp"

namespace bcreg {

struct IcpConfig {
  int max_iterations = 50;
  double convergence_tol = 1e-6;  // stop when the RMS cost change drops below this
  double max_correspondence_distance = 0.0;  // 0 disables the gate
};

// Point-to-point ICP: nearest-neighbor correspondences, unit-weight
// Procrustes, repeat. The result carries the final transform in `coarse`,
// the iteration count, and the per-iteration RMS cost history.
RegistrationResult icp(const PointCloud& source, const PointCloud& target,
                       const IcpConfig& cfg = {});

}  // namespace bcreg
