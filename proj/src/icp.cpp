#include "bcreg/icp.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bcreg {

namespace {

int nearest_index(const PointCloud& cloud, const Eigen::Vector3d& q) {
  int best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (int j = 0; j < static_cast<int>(cloud.size()); ++j) {
    const double d2 = (cloud.points[j] - q).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = j;
    }
  }
  return best;
}

}  // namespace

RegistrationResult icp(const PointCloud& source, const PointCloud& target,
                       const IcpConfig& cfg) {
  if (source.size() < 3 || target.size() < 3) {
    throw std::invalid_argument("icp: clouds must have at least 3 points");
  }
  if (cfg.max_iterations < 1 || cfg.convergence_tol <= 0.0) {
    throw std::invalid_argument("icp: config values must be positive");
  }
  const double gate2 = cfg.max_correspondence_distance > 0.0
                           ? cfg.max_correspondence_distance * cfg.max_correspondence_distance
                           : std::numeric_limits<double>::infinity();

  const auto t0 = std::chrono::steady_clock::now();
  RegistrationResult result;
  RigidTransform t;
  double prev_cost = std::numeric_limits<double>::infinity();

  while (true) {
    const PointCloud moved = apply_transform(t, source);
    WeightedPairs pairs;
    MatchSet matches;
    double ss = 0.0;
    for (int i = 0; i < static_cast<int>(moved.size()); ++i) {
      const int j = nearest_index(target, moved.points[i]);
      const double d2 = (target.points[j] - moved.points[i]).squaredNorm();
      if (d2 > gate2) continue;
      pairs.source.push_back(source.points[i]);
      pairs.target.push_back(target.points[j]);
      pairs.weights.push_back(1.0);
      matches.pairs.push_back({i, j, 1.0});
      ss += d2;
    }
    if (pairs.source.size() < 3) {
      throw std::invalid_argument("icp: degenerate correspondence set (fewer than 3 pairs)");
    }
    const double cost = std::sqrt(ss / static_cast<double>(pairs.source.size()));
    result.cost_history.push_back(cost);
    result.matches = matches;
    result.residual = cost;

    if (std::abs(prev_cost - cost) < cfg.convergence_tol ||
        result.iterations >= cfg.max_iterations) {
      break;
    }
    prev_cost = cost;
    t = weighted_procrustes(pairs);
    ++result.iterations;
  }

  result.coarse = t;
  result.coarse_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

}  // namespace bcreg
