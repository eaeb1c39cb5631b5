#pragma once

#include <cstdint>
#include <vector>

#include "bcreg/geometry.hpp"

namespace bcreg {

// Indices into a parent PointCloud; distinct, each < parent size.
using IndexSubset = std::vector<int>;

PointCloud gather(const PointCloud& c, const IndexSubset& indices);

// Greedy farthest point sampling. The first index is `start`; each subsequent
// index maximizes the minimum distance to the already-selected set, ties
// broken by lowest index. Output for n = k is a prefix of the output for
// n = k + 1.
IndexSubset farthest_point_sampling(const PointCloud& c, int n, int start = 0);

// The p indices closest to `query`, ascending by distance, ties by lowest
// index. Exact brute-force scan.
IndexSubset p_nearest_neighbors(const PointCloud& c, const Eigen::Vector3d& query, int p);

// All indices within distance r of `query`, ascending by index. May be empty.
IndexSubset radius_neighbors(const PointCloud& c, const Eigen::Vector3d& query, double r);

// Uniform without-replacement sample of n indices, deterministic per seed.
IndexSubset random_subset(const PointCloud& c, int n, std::uint64_t seed);

}  // namespace bcreg
