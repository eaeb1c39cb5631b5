#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "bcreg/features.hpp"
#include "bcreg/geometry.hpp"
#include "bcreg/matching.hpp"

namespace bcreg {

// Correspondences for the weighted rigid least-squares problem
// argmin_{R,t} sum_i w_i |R x_i + t - y_i|^2.
struct WeightedPairs {
  std::vector<Eigen::Vector3d> source;
  std::vector<Eigen::Vector3d> target;
  std::vector<double> weights;
};

struct PipelineConfig {
  int input_size = 1024;   // FPS size fed to the feature backend
  int mid_size = 512;      // intermediate FPS level
  int match_size = 256;    // points per side at the matching stage
  int k = 128;             // pairs selected by softmax pooling
  double tau = kSharpUnitNormTau;
  int fps_start = 0;
  bool refine = true;
  int denoise_p = 15;
  double denoise_tau = 0.1;
  bool denoise_pre_transform_lookup = false;
  // flag results whose best consensus entry is below
  // low_confidence_factor / (rows * cols)
  double low_confidence_factor = 3.0;
  bool keep_consensus = false;
};

struct RegistrationResult {
  RigidTransform coarse;
  std::optional<RigidTransform> refined;
  MatchSet matches;  // indices into the match-level subsets
  double residual = 0.0;  // weighted RMS over matched pairs, normalized frame
  double max_confidence = 0.0;
  bool low_confidence = false;

  bool failed = false;
  std::string error;

  // match-level index -> index into the input cloud
  std::vector<int> source_match_indices;
  std::vector<int> target_match_indices;

  std::optional<Eigen::MatrixXd> consensus;  // populated when cfg.keep_consensus

  int iterations = 0;                 // ICP
  std::vector<double> cost_history;   // ICP, RMS per iteration

  double coarse_seconds = 0.0;
  double refine_seconds = 0.0;

  const RigidTransform& final_transform() const { return refined ? *refined : coarse; }
};

// Closed-form solution of the weighted Procrustes problem: weighted-centroid
// subtraction, SVD of the weighted cross-covariance, det-sign reflection fix,
// t = y_centroid - R x_centroid. Throws on fewer than 3 positive-weight
// pairs, zero weight sum, or a rank-deficient (collinear) configuration.
RigidTransform weighted_procrustes(const WeightedPairs& pairs);

// Full pipeline: pair-normalize -> FPS to input_size -> backend features ->
// FPS chain to match_size -> similarity -> bilateral consensus -> softmax
// pooling -> weighted Procrustes, transforms denormalized to the input scale.
// correspondence ids (oracle backend) are index-aligned with the input clouds
// and follow the sampling chain. Degenerate geometry is reported through
// RegistrationResult::failed, not an exception.
RegistrationResult register_clouds(const PointCloud& source, const PointCloud& target,
                                   const FeatureBackend& backend,
                                   const PipelineConfig& cfg = {},
                                   const std::vector<int>& source_ids = {},
                                   const std::vector<int>& target_ids = {});

// register_clouds with the refinement stage disabled.
RegistrationResult coarse_register(const PointCloud& source, const PointCloud& target,
                                   const FeatureBackend& backend,
                                   const PipelineConfig& cfg = {},
                                   const std::vector<int>& source_ids = {},
                                   const std::vector<int>& target_ids = {});

}  // namespace bcreg
