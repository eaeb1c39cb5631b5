#include "bcreg/sampling.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "bcreg/rng.hpp"

namespace bcreg {

PointCloud gather(const PointCloud& c, const IndexSubset& indices) {
  PointCloud out;
  out.id = c.id;
  out.points.reserve(indices.size());
  for (int i : indices) {
    if (i < 0 || static_cast<std::size_t>(i) >= c.size()) {
      throw std::out_of_range("gather: index out of range");
    }
    out.points.push_back(c.points[i]);
  }
  return out;
}

IndexSubset farthest_point_sampling(const PointCloud& c, int n, int start) {
  const int m = static_cast<int>(c.size());
  if (n < 1 || n > m) {
    throw std::invalid_argument("farthest_point_sampling: n out of range");
  }
  if (start < 0 || start >= m) {
    throw std::invalid_argument("farthest_point_sampling: start out of range");
  }
  IndexSubset selected;
  selected.reserve(n);
  selected.push_back(start);

  // min squared distance from each point to the selected set
  std::vector<double> min_d2(m, std::numeric_limits<double>::infinity());
  int last = start;
  for (int step = 1; step < n; ++step) {
    const Eigen::Vector3d& anchor = c.points[last];
    int best = -1;
    double best_d2 = -1.0;
    for (int j = 0; j < m; ++j) {
      const double d2 = (c.points[j] - anchor).squaredNorm();
      if (d2 < min_d2[j]) min_d2[j] = d2;
      if (min_d2[j] > best_d2 && min_d2[j] > 0.0) {
        // strict > keeps the lowest index on ties
        best_d2 = min_d2[j];
        best = j;
      }
    }
    if (best < 0) {
      // all remaining points coincide with selected ones; fall back to the
      // lowest unselected index to keep the subset distinct
      std::vector<bool> used(m, false);
      for (int s : selected) used[s] = true;
      for (int j = 0; j < m; ++j) {
        if (!used[j]) { best = j; break; }
      }
      if (best < 0) throw std::logic_error("farthest_point_sampling: exhausted");
    }
    selected.push_back(best);
    min_d2[best] = 0.0;
    last = best;
  }
  return selected;
}

IndexSubset p_nearest_neighbors(const PointCloud& c, const Eigen::Vector3d& query, int p) {
  const int m = static_cast<int>(c.size());
  if (p < 1 || p > m) {
    throw std::invalid_argument("p_nearest_neighbors: p out of range");
  }
  std::vector<std::pair<double, int>> dist(m);
  for (int j = 0; j < m; ++j) {
    dist[j] = {(c.points[j] - query).squaredNorm(), j};
  }
  std::partial_sort(dist.begin(), dist.begin() + p, dist.end());
  IndexSubset out(p);
  for (int j = 0; j < p; ++j) out[j] = dist[j].second;
  return out;
}

IndexSubset radius_neighbors(const PointCloud& c, const Eigen::Vector3d& query, double r) {
  if (r <= 0.0) throw std::invalid_argument("radius_neighbors: radius must be positive");
  const double r2 = r * r;
  IndexSubset out;
  for (int j = 0; j < static_cast<int>(c.size()); ++j) {
    if ((c.points[j] - query).squaredNorm() <= r2) out.push_back(j);
  }
  return out;
}

IndexSubset random_subset(const PointCloud& c, int n, std::uint64_t seed) {
  const int m = static_cast<int>(c.size());
  if (n < 0 || n > m) {
    throw std::invalid_argument("random_subset: n out of range");
  }
  IndexSubset idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(mix_seed(seed, 0x73756273ULL));
  for (int i = 0; i < n; ++i) {
    const int j = i + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(m - i)));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(n);
  return idx;
}

}  // namespace bcreg
