#pragma once

#include <vector>

#include <Eigen/Core>

#include "bcreg/features.hpp"
#include "bcreg/geometry.hpp"
#include "bcreg/registration.hpp"

namespace bcreg {

struct DenoiseConfig {
  int p = 15;                // neighbors per matched point
  double temperature = 0.1;  // attention softmax sharpness
  bool pre_transform_lookup = false;
};

// Everything target_guided_denoise needs for one matched point: the P
// neighbor positions, their features (one row each), and the matched target
// point's feature.
struct NeighborhoodBundle {
  std::vector<Eigen::Vector3d> neighbor_points;
  Eigen::MatrixXd neighbor_features;
  Eigen::VectorXd target_feature;
};

// Attention over the neighborhood: scores -|Q_j - f_target|^2 / tau, softmax,
// convex combination of the neighbor positions.
Eigen::Vector3d target_guided_denoise(const NeighborhoodBundle& bundle,
                                      const DenoiseConfig& cfg);

// Denoises each matched source point against its P nearest dense-source
// neighbors (looked up in the coarse-aligned frame unless
// cfg.pre_transform_lookup) and re-solves the weighted Procrustes problem on
// the denoised pairs with the original confidences. Inputs share one frame;
// the returned result is the coarse result with the refined transform filled
// in.
RegistrationResult refined_register(const RegistrationResult& coarse,
                                    const PointCloud& source_sub, const PointCloud& target_sub,
                                    const PointCloud& source_dense,
                                    const FeatureSet& source_dense_feats,
                                    const FeatureSet& target_sub_feats,
                                    const DenoiseConfig& cfg = {});

}  // namespace bcreg
