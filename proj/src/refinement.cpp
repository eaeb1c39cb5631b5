#include "bcreg/refinement.hpp"

#include <cmath>
#include <stdexcept>

#include "bcreg/sampling.hpp"

namespace bcreg {

Eigen::Vector3d target_guided_denoise(const NeighborhoodBundle& bundle,
                                      const DenoiseConfig& cfg) {
  const long p = static_cast<long>(bundle.neighbor_points.size());
  if (p < 1) throw std::invalid_argument("target_guided_denoise: empty neighborhood");
  if (bundle.neighbor_features.rows() != p ||
      bundle.neighbor_features.cols() != bundle.target_feature.size()) {
    throw std::invalid_argument("target_guided_denoise: bundle shape mismatch");
  }
  if (cfg.temperature <= 0.0) {
    throw std::invalid_argument("target_guided_denoise: temperature must be positive");
  }

  Eigen::VectorXd scores(p);
  for (long j = 0; j < p; ++j) {
    const double d2 =
        (bundle.neighbor_features.row(j).transpose() - bundle.target_feature).squaredNorm();
    scores[j] = -d2 / cfg.temperature;
  }
  const double m = scores.maxCoeff();
  Eigen::VectorXd theta = (scores.array() - m).exp();
  theta /= theta.sum();

  Eigen::Vector3d out = Eigen::Vector3d::Zero();
  for (long j = 0; j < p; ++j) out += theta[j] * bundle.neighbor_points[j];
  return out;
}

RegistrationResult refined_register(const RegistrationResult& coarse,
                                    const PointCloud& source_sub, const PointCloud& target_sub,
                                    const PointCloud& source_dense,
                                    const FeatureSet& source_dense_feats,
                                    const FeatureSet& target_sub_feats,
                                    const DenoiseConfig& cfg) {
  if (cfg.p < 1 || static_cast<std::size_t>(cfg.p) > source_dense.size()) {
    throw std::invalid_argument("refined_register: P exceeds dense cloud size");
  }
  if (static_cast<std::size_t>(source_dense_feats.count()) != source_dense.size()) {
    throw std::invalid_argument("refined_register: dense cloud/features misaligned");
  }
  if (static_cast<std::size_t>(target_sub_feats.count()) != target_sub.size()) {
    throw std::invalid_argument("refined_register: target cloud/features misaligned");
  }
  if (coarse.matches.pairs.empty()) {
    throw std::invalid_argument("refined_register: coarse result carries no matches");
  }

  // Neighbor lookup in the coarse-aligned frame per the pipeline layout; a
  // rigid transform preserves distances, so the pre-transform option exists
  // for ablation only.
  const PointCloud* lookup = &source_dense;
  PointCloud transformed;
  if (!cfg.pre_transform_lookup) {
    transformed = apply_transform(coarse.coarse, source_dense);
    lookup = &transformed;
  }

  WeightedPairs pairs;
  pairs.source.reserve(coarse.matches.pairs.size());
  pairs.target.reserve(coarse.matches.pairs.size());
  pairs.weights.reserve(coarse.matches.pairs.size());
  for (const Match& m : coarse.matches.pairs) {
    const Eigen::Vector3d x = source_sub.points[m.source_index];
    const Eigen::Vector3d query = cfg.pre_transform_lookup ? x : coarse.coarse.apply(x);
    const IndexSubset nn = p_nearest_neighbors(*lookup, query, cfg.p);

    NeighborhoodBundle bundle;
    bundle.neighbor_points.reserve(cfg.p);
    bundle.neighbor_features.resize(cfg.p, source_dense_feats.dim());
    for (int j = 0; j < cfg.p; ++j) {
      bundle.neighbor_points.push_back(source_dense.points[nn[j]]);
      bundle.neighbor_features.row(j) = source_dense_feats.vectors.row(nn[j]);
    }
    bundle.target_feature = target_sub_feats.vectors.row(m.target_index).transpose();

    pairs.source.push_back(target_guided_denoise(bundle, cfg));
    pairs.target.push_back(target_sub.points[m.target_index]);
    pairs.weights.push_back(m.confidence);
  }

  RegistrationResult out = coarse;
  out.refined = weighted_procrustes(pairs);
  return out;
}

}  // namespace bcreg
