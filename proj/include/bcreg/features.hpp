#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "bcreg/geometry.hpp"
#include "bcreg/sampling.hpp"

namespace bcreg {

// Per-point descriptors, one row per point, index-aligned with a PointCloud.
// Rows are unit L2 norm.
struct FeatureSet {
  Eigen::MatrixXd vectors;

  int dim() const { return static_cast<int>(vectors.cols()); }
  long count() const { return static_cast<long>(vectors.rows()); }
};

enum class FeatureBackendKind { kOracle, kHandcrafted, kPrecomputed };

// Stand-in for a learned encoder. Three kinds:
//   oracle       - unique seeded random unit vector per correspondence id, so
//                  corresponding source/target points get identical features;
//                  only usable when ground-truth ids exist (synthetic data).
//   handcrafted  - rotation-invariant local descriptor built from per-radius
//                  neighbor statistics (distance histogram, sorted covariance
//                  eigenvalues, neighbor count).
//   precomputed  - loaded from a feature file index-aligned with the cloud.
struct FeatureBackend {
  FeatureBackendKind kind = FeatureBackendKind::kHandcrafted;

  // oracle
  std::uint64_t seed = 0;
  int oracle_dim = 32;

  // handcrafted
  std::vector<double> radii{0.1, 0.2, 0.4};
  int histogram_bins = 8;

  // precomputed; target_path empty means "same file as path"
  std::string path;
  std::string target_path;

  static FeatureBackend oracle(std::uint64_t seed, int dim = 32);
  static FeatureBackend handcrafted();
  static FeatureBackend precomputed(std::string source_path, std::string target_path = "");

  FeatureBackend with_path(const std::string& p) const;
  const std::string& resolved_target_path() const {
    return target_path.empty() ? path : target_path;
  }
};

// One unit-norm descriptor per point. For the oracle kind,
// correspondence_ids[i] labels point i (empty means identity labeling by
// index). Empty handcrafted neighborhoods contribute zero statistics.
FeatureSet extract_features(const FeatureBackend& backend, const PointCloud& c,
                            const std::vector<int>& correspondence_ids = {});

// Inverse-distance-weighted 3-nearest-neighbor interpolation of subsampled
// features onto dense points, re-normalized to unit norm.
FeatureSet interpolate_features(const PointCloud& sub_points, const FeatureSet& sub_feats,
                                const PointCloud& dense_points);

FeatureSet gather(const FeatureSet& f, const IndexSubset& indices);

// Text feature file: header "D <dim> N <count>" then one point per line.
FeatureSet load_feature_file(const std::string& path);
void save_feature_file(const std::string& path, const FeatureSet& f);

}  // namespace bcreg
