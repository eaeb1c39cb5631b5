#include "bcreg/registration.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "bcreg/refinement.hpp"
#include "bcreg/sampling.hpp"

namespace bcreg {

RigidTransform weighted_procrustes(const WeightedPairs& pairs) {
  const std::size_t n = pairs.source.size();
  if (pairs.target.size() != n || pairs.weights.size() != n) {
    throw std::invalid_argument("weighted_procrustes: source/target/weight length mismatch");
  }
  double w_sum = 0.0;
  int positive = 0;
  for (double w : pairs.weights) {
    if (w < 0.0) throw std::invalid_argument("weighted_procrustes: negative weight");
    if (w > 0.0) ++positive;
    w_sum += w;
  }
  if (positive < 3) {
    throw std::invalid_argument("weighted_procrustes: need at least 3 pairs with positive weight");
  }
  if (w_sum <= 0.0) {
    throw std::invalid_argument("weighted_procrustes: weight sum must be positive");
  }

  Eigen::Vector3d src_centroid = Eigen::Vector3d::Zero();
  Eigen::Vector3d tgt_centroid = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    src_centroid += pairs.weights[i] * pairs.source[i];
    tgt_centroid += pairs.weights[i] * pairs.target[i];
  }
  src_centroid /= w_sum;
  tgt_centroid /= w_sum;

  Eigen::Matrix3d cross = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    cross += pairs.weights[i] * (pairs.source[i] - src_centroid) *
             (pairs.target[i] - tgt_centroid).transpose();
  }
  cross /= w_sum;

  Eigen::JacobiSVD<Eigen::Matrix3d> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector3d& sv = svd.singularValues();
  // collinear or coincident configurations leave the rotation about the
  // residual axis unconstrained
  if (sv[1] <= 1e-12 * sv[0] || sv[0] <= 0.0) {
    throw std::invalid_argument(
        "weighted_procrustes: degenerate configuration (weighted points collinear or coincident)");
  }

  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  if ((svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0) {
    d(2, 2) = -1.0;
  }
  RigidTransform t;
  t.rotation = svd.matrixV() * d * svd.matrixU().transpose();
  t.translation = tgt_centroid - t.rotation * src_centroid;
  return t;
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<int> gather_ids(const std::vector<int>& ids, const IndexSubset& idx) {
  if (ids.empty()) return {idx.begin(), idx.end()};
  std::vector<int> out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = ids[idx[i]];
  return out;
}

struct SampledSide {
  PointCloud input;      // input_size points, normalized frame
  PointCloud sub;        // match_size points
  FeatureSet input_feats;
  FeatureSet sub_feats;
  std::vector<int> input_to_cloud;  // input level -> original cloud index
  std::vector<int> sub_to_cloud;    // match level -> original cloud index
  std::vector<int> sub_ids;         // correspondence ids at match level
};

SampledSide sample_side(const PointCloud& normalized, const FeatureBackend& backend,
                        const PipelineConfig& cfg, const std::vector<int>& ids) {
  const int n = static_cast<int>(normalized.size());
  const int input_n = std::min(cfg.input_size, n);
  const int mid_n = std::min(cfg.mid_size, input_n);
  const int match_n = std::min(cfg.match_size, mid_n);

  SampledSide side;
  const IndexSubset input_idx = farthest_point_sampling(normalized, input_n, cfg.fps_start);
  side.input = gather(normalized, input_idx);
  side.input_to_cloud = IndexSubset(input_idx);
  const std::vector<int> input_ids = gather_ids(ids, input_idx);

  if (backend.kind == FeatureBackendKind::kPrecomputed) {
    // file rows are aligned with the original cloud; follow the sampling
    FeatureSet all = extract_features(backend, normalized);
    side.input_feats = gather(all, input_idx);
  } else {
    side.input_feats = extract_features(backend, side.input, input_ids);
  }

  const IndexSubset mid_idx = farthest_point_sampling(side.input, mid_n, 0);
  const PointCloud mid = gather(side.input, mid_idx);
  const FeatureSet mid_feats = gather(side.input_feats, mid_idx);
  const std::vector<int> mid_ids = gather_ids(input_ids, mid_idx);
  std::vector<int> mid_to_cloud(mid_idx.size());
  for (std::size_t i = 0; i < mid_idx.size(); ++i) mid_to_cloud[i] = side.input_to_cloud[mid_idx[i]];

  const IndexSubset sub_idx = farthest_point_sampling(mid, match_n, 0);
  side.sub = gather(mid, sub_idx);
  side.sub_feats = gather(mid_feats, sub_idx);
  side.sub_ids = gather_ids(mid_ids, sub_idx);
  side.sub_to_cloud.resize(sub_idx.size());
  for (std::size_t i = 0; i < sub_idx.size(); ++i) side.sub_to_cloud[i] = mid_to_cloud[sub_idx[i]];
  return side;
}

// One shared scale keeps the recovered transform rigid; each cloud is
// centered on its own centroid, matching the benchmark protocol.
NormalizationRecord box_record(const PointCloud& c) {
  const Eigen::Vector3d center = c.centroid();
  double half_extent = 0.0;
  for (const auto& p : c.points) {
    half_extent = std::max(half_extent, (p - center).cwiseAbs().maxCoeff());
  }
  if (half_extent <= 0.0) {
    throw std::invalid_argument("register_clouds: degenerate cloud with zero extent");
  }
  return {2.0 / half_extent, center};
}

void normalize_pair(const PointCloud& source, const PointCloud& target,
                    PointCloud& source_n, PointCloud& target_n,
                    NormalizationRecord& rec_s, NormalizationRecord& rec_t) {
  rec_s = box_record(source);
  rec_t = box_record(target);
  const double scale = std::min(rec_s.scale, rec_t.scale);
  rec_s.scale = scale;
  rec_t.scale = scale;
  source_n.id = source.id;
  target_n.id = target.id;
  source_n.points.reserve(source.size());
  target_n.points.reserve(target.size());
  for (const auto& p : source.points) source_n.points.push_back(rec_s.normalize(p));
  for (const auto& p : target.points) target_n.points.push_back(rec_t.normalize(p));
}

RigidTransform denormalize_transform(const RigidTransform& t, const NormalizationRecord& rec_s,
                                     const NormalizationRecord& rec_t) {
  // y_n = R x_n + t with x_n = s (x - o_s), y_n = s (y - o_t)
  RigidTransform out;
  out.rotation = t.rotation;
  out.translation = rec_t.offset - t.rotation * rec_s.offset + t.translation / rec_t.scale;
  return out;
}

}  // namespace

RegistrationResult register_clouds(const PointCloud& source, const PointCloud& target,
                                   const FeatureBackend& backend, const PipelineConfig& cfg,
                                   const std::vector<int>& source_ids,
                                   const std::vector<int>& target_ids) {
  if (source.size() < 3 || target.size() < 3) {
    throw std::invalid_argument("register_clouds: clouds must have at least 3 points");
  }
  if (!source_ids.empty() && source_ids.size() != source.size()) {
    throw std::invalid_argument("register_clouds: source id count != cloud size");
  }
  if (!target_ids.empty() && target_ids.size() != target.size()) {
    throw std::invalid_argument("register_clouds: target id count != cloud size");
  }

  RegistrationResult result;
  const auto t0 = std::chrono::steady_clock::now();

  PointCloud source_n, target_n;
  NormalizationRecord rec_s, rec_t;
  normalize_pair(source, target, source_n, target_n, rec_s, rec_t);

  FeatureBackend backend_s = backend;
  FeatureBackend backend_t = backend;
  if (backend.kind == FeatureBackendKind::kPrecomputed) {
    backend_t = backend.with_path(backend.resolved_target_path());
  }

  const SampledSide src = sample_side(source_n, backend_s, cfg, source_ids);
  const SampledSide tgt = sample_side(target_n, backend_t, cfg, target_ids);

  const SimilarityMatrix sim = similarity_matrix(src.sub_feats, tgt.sub_feats);
  const ConsensusMatrix consensus = bilateral_consensus(sim, cfg.tau);
  result.max_confidence = consensus.maxCoeff();
  const double uniform_level =
      1.0 / (static_cast<double>(consensus.rows()) * static_cast<double>(consensus.cols()));
  result.low_confidence = result.max_confidence < cfg.low_confidence_factor * uniform_level;
  if (cfg.keep_consensus) result.consensus = consensus;

  const int k = std::min<int>(cfg.k, std::min(consensus.rows(), consensus.cols()));
  result.matches = softmax_pool_top_k(consensus, k);

  result.source_match_indices.reserve(result.matches.k());
  result.target_match_indices.reserve(result.matches.k());
  WeightedPairs pairs;
  for (const Match& m : result.matches.pairs) {
    pairs.source.push_back(src.sub.points[m.source_index]);
    pairs.target.push_back(tgt.sub.points[m.target_index]);
    pairs.weights.push_back(m.confidence);
    result.source_match_indices.push_back(src.sub_to_cloud[m.source_index]);
    result.target_match_indices.push_back(tgt.sub_to_cloud[m.target_index]);
  }

  RigidTransform coarse_n;
  try {
    coarse_n = weighted_procrustes(pairs);
  } catch (const std::invalid_argument& e) {
    result.failed = true;
    result.error = e.what();
    result.coarse_seconds = seconds_since(t0);
    return result;
  }

  double ss = 0.0, ws = 0.0;
  for (std::size_t i = 0; i < pairs.source.size(); ++i) {
    ss += pairs.weights[i] * (coarse_n.apply(pairs.source[i]) - pairs.target[i]).squaredNorm();
    ws += pairs.weights[i];
  }
  result.residual = ws > 0.0 ? std::sqrt(ss / ws) : 0.0;

  result.coarse = denormalize_transform(coarse_n, rec_s, rec_t);
  result.coarse_seconds = seconds_since(t0);

  if (cfg.refine) {
    const auto t1 = std::chrono::steady_clock::now();
    DenoiseConfig dcfg;
    dcfg.p = std::min<int>(cfg.denoise_p, static_cast<int>(src.input.size()));
    dcfg.temperature = cfg.denoise_tau;
    dcfg.pre_transform_lookup = cfg.denoise_pre_transform_lookup;

    RegistrationResult coarse_frame = result;
    coarse_frame.coarse = coarse_n;  // refinement runs in the normalized frame
    try {
      const FeatureSet dense_feats = interpolate_features(src.sub, src.sub_feats, src.input);
      const RegistrationResult refined_n = refined_register(
          coarse_frame, src.sub, tgt.sub, src.input, dense_feats, tgt.sub_feats, dcfg);
      if (refined_n.refined) {
        result.refined = denormalize_transform(*refined_n.refined, rec_s, rec_t);
      }
    } catch (const std::invalid_argument& e) {
      // coarse result stays valid; the missing refined transform plus the
      // message signal the partial failure
      result.error = e.what();
    }
    result.refine_seconds = seconds_since(t1);
  }
  return result;
}

RegistrationResult coarse_register(const PointCloud& source, const PointCloud& target,
                                   const FeatureBackend& backend, const PipelineConfig& cfg,
                                   const std::vector<int>& source_ids,
                                   const std::vector<int>& target_ids) {
  PipelineConfig c = cfg;
  c.refine = false;
  return register_clouds(source, target, backend, c, source_ids, target_ids);
}

}  // namespace bcreg
