#include "bcreg/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "bcreg/rng.hpp"
#include "bcreg/sampling.hpp"

namespace bcreg {

double loss_rot(const Eigen::Matrix3d& r_gt, const Eigen::Matrix3d& r_pred) {
  return (r_gt.transpose() * r_pred - Eigen::Matrix3d::Identity()).norm();
}

double loss_trans(const Eigen::Vector3d& t_gt, const Eigen::Vector3d& t_pred) {
  return (t_gt - t_pred).norm();
}

double combined_loss(const TransformLoss& coarse, const TransformLoss& refined, double lambda) {
  if (lambda < 0.0 || lambda > 1.0) {
    throw std::invalid_argument("combined_loss: lambda must be in [0, 1]");
  }
  return lambda * coarse.total() + (1.0 - lambda) * refined.total();
}

std::string method_name(Method m) {
  switch (m) {
    case Method::kCoarse: return "coarse";
    case Method::kRefined: return "refined";
    case Method::kIcp: return "icp";
  }
  return "unknown";
}

Method method_from_name(const std::string& name) {
  if (name == "coarse") return Method::kCoarse;
  if (name == "refined") return Method::kRefined;
  if (name == "icp") return Method::kIcp;
  throw std::invalid_argument("unknown method: " + name);
}

std::string shape_name(CloudShape s) {
  switch (s) {
    case CloudShape::kBox: return "box";
    case CloudShape::kBlobs: return "blobs";
    case CloudShape::kLShape: return "lshape";
    case CloudShape::kSurface: return "surface";
  }
  return "unknown";
}

CloudShape shape_from_name(const std::string& name) {
  if (name == "box") return CloudShape::kBox;
  if (name == "blobs") return CloudShape::kBlobs;
  if (name == "lshape") return CloudShape::kLShape;
  if (name == "surface") return CloudShape::kSurface;
  throw std::invalid_argument("unknown shape: " + name);
}

PointCloud generate_cloud(CloudShape shape, int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("generate_cloud: n must be positive");
  Rng rng(mix_seed(seed, 0x636c6f75ULL));
  PointCloud c;
  c.points.reserve(n);
  switch (shape) {
    case CloudShape::kBox:
      for (int i = 0; i < n; ++i) {
        c.points.emplace_back(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
      }
      break;
    case CloudShape::kBlobs: {
      constexpr int kBlobs = 4;
      Eigen::Vector3d centers[kBlobs];
      for (auto& center : centers) {
        center = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
      }
      for (int i = 0; i < n; ++i) {
        const auto& center = centers[rng.uniform_index(kBlobs)];
        c.points.push_back(center + rng.gaussian_vec3(0.25));
      }
      break;
    }
    case CloudShape::kLShape:
      // two unequal axis-aligned arms; no rotational symmetry
      for (int i = 0; i < n; ++i) {
        if (rng.uniform() < 0.62) {
          c.points.emplace_back(rng.uniform(0.0, 1.0), rng.uniform(0.0, 0.35),
                                rng.uniform(0.0, 0.25));
        } else {
          c.points.emplace_back(rng.uniform(0.0, 0.3), rng.uniform(0.35, 1.2),
                                rng.uniform(0.0, 0.25));
        }
      }
      break;
    case CloudShape::kSurface:
      for (int i = 0; i < n; ++i) {
        const double x = rng.uniform(-1, 1);
        const double y = rng.uniform(-1, 1);
        const double z = 0.35 * std::sin(1.7 * x + 0.6) * std::cos(2.3 * y - 0.4) + 0.15 * x;
        c.points.emplace_back(x, y, z);
      }
      break;
  }
  return c;
}

namespace {

RigidTransform exact_level_rotation(double level_deg, AxesMode mode) {
  RigidTransform t;
  if (mode == AxesMode::kZOnly) {
    t.rotation = axis_rotation(Axis::kZ, level_deg);
  } else {
    t.rotation = axis_rotation(Axis::kZ, level_deg) * axis_rotation(Axis::kY, level_deg) *
                 axis_rotation(Axis::kX, level_deg);
  }
  return t;
}

struct TrialInstance {
  PointCloud source;  // rotated, noisy, FPS-sampled to the pipeline input size
  PointCloud target;
  std::vector<int> source_ids;
  std::vector<int> target_ids;
  RigidTransform gt;  // maps source onto target
};

TrialInstance make_trial(const ExperimentConfig& cfg, double level, std::uint64_t trial_seed) {
  Rng rng(mix_seed(trial_seed, 0x7472696cULL));
  const PointCloud base = generate_cloud(cfg.shape, cfg.base_points, trial_seed);

  const int subset_n = std::min(cfg.subset_points, static_cast<int>(base.size()));
  const IndexSubset tgt_idx = random_subset(base, subset_n, mix_seed(trial_seed, 1));
  const IndexSubset src_idx = cfg.pairing == PairingMode::kExactCopy
                                  ? tgt_idx
                                  : random_subset(base, subset_n, mix_seed(trial_seed, 2));
  PointCloud target_raw = gather(base, tgt_idx);
  PointCloud source_raw = gather(base, src_idx);

  // correspondence ids: exact copies share indices; disjoint subsets pair
  // each clean source point with its nearest target point
  std::vector<int> src_ids(source_raw.size());
  std::vector<int> tgt_ids(target_raw.size());
  std::iota(tgt_ids.begin(), tgt_ids.end(), 0);
  if (cfg.pairing == PairingMode::kExactCopy) {
    std::iota(src_ids.begin(), src_ids.end(), 0);
  } else {
    for (std::size_t i = 0; i < source_raw.size(); ++i) {
      src_ids[i] = p_nearest_neighbors(target_raw, source_raw.points[i], 1)[0];
    }
  }

  if (cfg.noise_sigma > 0.0) {
    for (auto& p : source_raw.points) p += rng.gaussian_vec3(cfg.noise_sigma);
  }

  const int input_n = std::min(cfg.pipeline.input_size, subset_n);
  const IndexSubset src_fps = farthest_point_sampling(source_raw, input_n, 0);
  const IndexSubset tgt_fps = farthest_point_sampling(target_raw, input_n, 0);

  TrialInstance inst;
  inst.target = gather(target_raw, tgt_fps);
  inst.target_ids.reserve(tgt_fps.size());
  for (int i : tgt_fps) inst.target_ids.push_back(tgt_ids[i]);

  PointCloud source_in = gather(source_raw, src_fps);
  inst.source_ids.reserve(src_fps.size());
  for (int i : src_fps) inst.source_ids.push_back(src_ids[i]);

  const RigidTransform applied = exact_level_rotation(level, cfg.axes_mode);
  inst.source = apply_transform(applied, source_in);
  inst.gt = inverse(applied);
  return inst;
}

TrialResult run_method(const TrialInstance& inst, Method method,
                       const RegistrationResult* shared) {
  TrialResult row;
  row.method = method_name(method);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    RigidTransform pred;
    if (method == Method::kIcp) {
      const RegistrationResult r = icp(inst.source, inst.target, IcpConfig{});
      pred = r.coarse;
      row.residual = r.residual;
    } else {
      const RegistrationResult& r = *shared;
      if (r.failed) throw std::runtime_error(r.error);
      if (method == Method::kRefined && !r.refined) {
        throw std::runtime_error("refinement did not produce a transform");
      }
      pred = method == Method::kRefined ? *r.refined : r.coarse;
      row.residual = r.residual;
    }
    row.re_deg = rotation_error_deg(inst.gt.rotation, pred.rotation);
    row.te = translation_error(inst.gt.translation, pred.translation);
  } catch (const std::exception&) {
    row.failed = true;
  }
  row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

LevelAggregate aggregate(double level, const std::string& method,
                         const std::vector<TrialResult>& trials) {
  LevelAggregate agg;
  agg.level = level;
  agg.method = method;
  std::vector<double> res, tes;
  for (const TrialResult& t : trials) {
    if (t.level != level || t.method != method) continue;
    ++agg.n;
    if (t.failed) {
      ++agg.n_fail;
      continue;
    }
    res.push_back(t.re_deg);
    tes.push_back(t.te);
  }
  if (!res.empty()) {
    agg.mean_re = std::accumulate(res.begin(), res.end(), 0.0) / res.size();
    agg.mean_te = std::accumulate(tes.begin(), tes.end(), 0.0) / tes.size();
    agg.std_re = sample_std(res);
    agg.std_te = sample_std(tes);
    agg.median_re = median(res);
    agg.median_te = median(tes);
  }
  return agg;
}

}  // namespace

double sample_std(const std::vector<double>& values) {
  if (values.size() < 2) return 0.0;
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

BenchmarkReport run_benchmark(const ExperimentConfig& cfg, const FeatureBackend& backend,
                              const std::vector<Method>& methods) {
  if (cfg.trials_per_level < 1) {
    throw std::invalid_argument("run_benchmark: trials_per_level must be >= 1");
  }
  if (cfg.noise_sigma < 0.0) {
    throw std::invalid_argument("run_benchmark: noise sigma must be >= 0");
  }
  const bool need_refined =
      std::find(methods.begin(), methods.end(), Method::kRefined) != methods.end();
  const bool need_coarse =
      std::find(methods.begin(), methods.end(), Method::kCoarse) != methods.end();

  BenchmarkReport report;
  std::uint64_t trial_index = 0;
  for (double level : cfg.rotation_levels) {
    for (int t = 0; t < cfg.trials_per_level; ++t, ++trial_index) {
      const std::uint64_t trial_seed = mix_seed(cfg.seed, trial_index);
      const TrialInstance inst = make_trial(cfg, level, trial_seed);

      RegistrationResult shared;
      if (need_coarse || need_refined) {
        PipelineConfig pc = cfg.pipeline;
        pc.refine = need_refined;
        try {
          shared = register_clouds(inst.source, inst.target, backend, pc, inst.source_ids,
                                   inst.target_ids);
        } catch (const std::exception& e) {
          shared.failed = true;
          shared.error = e.what();
        }
      }
      for (Method m : methods) {
        TrialResult row = run_method(inst, m, &shared);
        row.level = level;
        row.trial = static_cast<int>(trial_index);
        report.trials.push_back(std::move(row));
      }
    }
  }
  for (double level : cfg.rotation_levels) {
    for (Method m : methods) {
      report.rows.push_back(aggregate(level, method_name(m), report.trials));
    }
  }
  return report;
}

std::vector<std::pair<int, BenchmarkReport>> run_k_sweep(const ExperimentConfig& cfg,
                                                         const FeatureBackend& backend,
                                                         const std::vector<Method>& methods) {
  std::vector<int> ks = cfg.k_sweep;
  if (ks.empty()) ks.push_back(cfg.pipeline.k);
  std::vector<std::pair<int, BenchmarkReport>> sweep;
  sweep.reserve(ks.size());
  for (int k : ks) {
    ExperimentConfig c = cfg;
    c.pipeline.k = k;
    c.k_sweep.clear();
    sweep.emplace_back(k, run_benchmark(c, backend, methods));
  }
  return sweep;
}

namespace {

void csv_value(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  out << buf;
}

void csv_row(std::ostream& out, const LevelAggregate& a) {
  csv_value(out, a.level);
  out << "," << a.method << ",";
  csv_value(out, a.mean_re);
  out << ",";
  csv_value(out, a.std_re);
  out << ",";
  csv_value(out, a.median_re);
  out << ",";
  csv_value(out, a.mean_te);
  out << ",";
  csv_value(out, a.std_te);
  out << ",";
  csv_value(out, a.median_te);
  out << "," << a.n_fail << "\n";
}

}  // namespace

void write_report_csv(std::ostream& out, const BenchmarkReport& report) {
  out << "level,method,mean_RE,std_RE,median_RE,mean_TE,std_TE,median_TE,n_fail\n";
  for (const LevelAggregate& a : report.rows) csv_row(out, a);
}

void write_report_json(std::ostream& out, const BenchmarkReport& report) {
  char buf[32];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return std::string(buf);
  };
  out << "{\n  \"rows\": [\n";
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const LevelAggregate& a = report.rows[i];
    out << "    {\"level\": " << num(a.level) << ", \"method\": \"" << a.method
        << "\", \"mean_RE\": " << num(a.mean_re) << ", \"std_RE\": " << num(a.std_re)
        << ", \"median_RE\": " << num(a.median_re) << ", \"mean_TE\": " << num(a.mean_te)
        << ", \"std_TE\": " << num(a.std_te) << ", \"median_TE\": " << num(a.median_te)
        << ", \"n_fail\": " << a.n_fail << "}";
    out << (i + 1 < report.rows.size() ? ",\n" : "\n");
  }
  out << "  ]\n}\n";
}

void write_k_sweep_csv(std::ostream& out,
                       const std::vector<std::pair<int, BenchmarkReport>>& sweep) {
  out << "k,level,method,mean_RE,std_RE,median_RE,mean_TE,std_TE,median_TE,n_fail\n";
  for (const auto& [k, report] : sweep) {
    for (const LevelAggregate& a : report.rows) {
      out << k << ",";
      csv_row(out, a);
    }
  }
}

}  // namespace bcreg
