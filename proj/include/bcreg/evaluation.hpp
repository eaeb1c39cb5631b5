#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "bcreg/features.hpp"
#include "bcreg/geometry.hpp"
#include "bcreg/icp.hpp"
#include "bcreg/registration.hpp"

namespace bcreg {

// |R_gt^T R_pred - I|_F; zero exactly when the rotations agree.
double loss_rot(const Eigen::Matrix3d& r_gt, const Eigen::Matrix3d& r_pred);

double loss_trans(const Eigen::Vector3d& t_gt, const Eigen::Vector3d& t_pred);

struct TransformLoss {
  double rot = 0.0;
  double trans = 0.0;
  double total() const { return rot + trans; }
};

// lambda * (rot + trans)_coarse + (1 - lambda) * (rot + trans)_refined.
double combined_loss(const TransformLoss& coarse, const TransformLoss& refined,
                     double lambda = 0.6);

inline constexpr double kBenchmarkNoiseSigma = 0.01;

enum class AxesMode { kZOnly, kXyzSequential };
enum class PairingMode { kExactCopy, kDisjointSubsets };
enum class CloudShape { kBox, kBlobs, kLShape, kSurface };
enum class Method { kCoarse, kRefined, kIcp };

std::string method_name(Method m);
std::string shape_name(CloudShape s);
CloudShape shape_from_name(const std::string& name);
Method method_from_name(const std::string& name);

struct ExperimentConfig {
  std::vector<double> rotation_levels{45, 90, 135, 180, -45, -90, -135, -180};
  AxesMode axes_mode = AxesMode::kZOnly;
  int trials_per_level = 5;
  double noise_sigma = 0.0;  // kBenchmarkNoiseSigma is the reference level, off by default
  int base_points = 8192;
  int subset_points = 7168;
  PairingMode pairing = PairingMode::kExactCopy;
  CloudShape shape = CloudShape::kBox;
  std::vector<int> k_sweep;  // empty = single run at pipeline.k
  std::uint64_t seed = 0;
  PipelineConfig pipeline;
};

struct TrialResult {
  double level = 0.0;
  int trial = 0;
  std::string method;
  double re_deg = 0.0;
  double te = 0.0;
  double residual = 0.0;
  double seconds = 0.0;
  bool failed = false;
};

struct LevelAggregate {
  double level = 0.0;
  std::string method;
  int n = 0;
  int n_fail = 0;
  double mean_re = 0.0, std_re = 0.0, median_re = 0.0;
  double mean_te = 0.0, std_te = 0.0, median_te = 0.0;
};

struct BenchmarkReport {
  std::vector<TrialResult> trials;
  std::vector<LevelAggregate> rows;  // one per level x method
};

// Deterministic synthetic clouds: uniform box, gaussian blobs, an asymmetric
// L shape, and a wavy surface sheet.
PointCloud generate_cloud(CloudShape shape, int n, std::uint64_t seed);

// Per trial: generate a base cloud, draw source/target subsets (exact copy or
// disjoint), add gaussian noise to the source, FPS both to the pipeline input
// size, rotate the source by the exact level, then run each method.
// Deterministic for a fixed config seed.
BenchmarkReport run_benchmark(const ExperimentConfig& cfg, const FeatureBackend& backend,
                              const std::vector<Method>& methods);

// One full benchmark per K in cfg.k_sweep (pipeline.k overridden).
std::vector<std::pair<int, BenchmarkReport>> run_k_sweep(const ExperimentConfig& cfg,
                                                         const FeatureBackend& backend,
                                                         const std::vector<Method>& methods);

// level,method,mean_RE,std_RE,median_RE,mean_TE,std_TE,median_TE,n_fail
void write_report_csv(std::ostream& out, const BenchmarkReport& report);
void write_report_json(std::ostream& out, const BenchmarkReport& report);
void write_k_sweep_csv(std::ostream& out,
                       const std::vector<std::pair<int, BenchmarkReport>>& sweep);

// Sample standard deviation (n - 1); 0 for fewer than two values.
double sample_std(const std::vector<double>& values);
double median(std::vector<double> values);

}  // namespace bcreg
