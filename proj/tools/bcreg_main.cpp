#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bcreg/cloud_io.hpp"
#include "bcreg/evaluation.hpp"
#include "bcreg/icp.hpp"
#include "bcreg/matching.hpp"
#include "bcreg/registration.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRegistrationFailed = 2;

bcreg::FeatureBackend backend_from_flag(const std::string& flag, std::uint64_t seed) {
  if (flag == "oracle") return bcreg::FeatureBackend::oracle(seed);
  if (flag == "handcrafted") return bcreg::FeatureBackend::handcrafted();
  if (flag.rfind("file:", 0) == 0) {
    const std::string paths = flag.substr(5);
    const auto comma = paths.find(',');
    if (comma == std::string::npos) {
      return bcreg::FeatureBackend::precomputed(paths);
    }
    return bcreg::FeatureBackend::precomputed(paths.substr(0, comma), paths.substr(comma + 1));
  }
  throw CLI::ValidationError("--backend",
                             "expected oracle, handcrafted, or file:<src>[,<tgt>]");
}

nlohmann::ordered_json transform_json(const bcreg::RigidTransform& t) {
  nlohmann::ordered_json j;
  std::vector<double> rot(9);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) rot[r * 3 + c] = t.rotation(r, c);
  }
  j["rotation"] = rot;
  j["translation"] = {t.translation.x(), t.translation.y(), t.translation.z()};
  return j;
}

void emit_json(const nlohmann::ordered_json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  out << j.dump(2) << "\n";
}

bcreg::ExperimentConfig experiment_from_json(const nlohmann::json& j) {
  bcreg::ExperimentConfig cfg;
  if (j.contains("levels")) cfg.rotation_levels = j["levels"].get<std::vector<double>>();
  if (j.contains("axes")) {
    const std::string axes = j["axes"];
    if (axes == "z") cfg.axes_mode = bcreg::AxesMode::kZOnly;
    else if (axes == "xyz") cfg.axes_mode = bcreg::AxesMode::kXyzSequential;
    else throw std::runtime_error("config: axes must be \"z\" or \"xyz\"");
  }
  if (j.contains("trials_per_level")) cfg.trials_per_level = j["trials_per_level"];
  if (j.contains("noise_sigma")) cfg.noise_sigma = j["noise_sigma"];
  if (j.contains("base_points")) cfg.base_points = j["base_points"];
  if (j.contains("subset_points")) cfg.subset_points = j["subset_points"];
  if (j.contains("pairing")) {
    const std::string pairing = j["pairing"];
    if (pairing == "exact-copy") cfg.pairing = bcreg::PairingMode::kExactCopy;
    else if (pairing == "disjoint") cfg.pairing = bcreg::PairingMode::kDisjointSubsets;
    else throw std::runtime_error("config: pairing must be \"exact-copy\" or \"disjoint\"");
  }
  if (j.contains("shape")) cfg.shape = bcreg::shape_from_name(j["shape"]);
  if (j.contains("k_sweep")) cfg.k_sweep = j["k_sweep"].get<std::vector<int>>();
  if (j.contains("seed")) cfg.seed = j["seed"];
  if (j.contains("input_size")) cfg.pipeline.input_size = j["input_size"];
  if (j.contains("mid_size")) cfg.pipeline.mid_size = j["mid_size"];
  if (j.contains("match_size")) cfg.pipeline.match_size = j["match_size"];
  if (j.contains("k")) cfg.pipeline.k = j["k"];
  if (j.contains("tau")) cfg.pipeline.tau = j["tau"];
  if (j.contains("denoise_p")) cfg.pipeline.denoise_p = j["denoise_p"];
  if (j.contains("denoise_tau")) cfg.pipeline.denoise_tau = j["denoise_tau"];
  return cfg;
}

int run_register(const std::string& src_path, const std::string& tgt_path,
                 const std::string& backend_flag, int k, int p, double tau, bool no_refine,
                 const std::string& out_path, const std::string& gt_path,
                 const std::string& dump_consensus, std::uint64_t seed) {
  const bcreg::PointCloud source = bcreg::parse_cloud(src_path);
  const bcreg::PointCloud target = bcreg::parse_cloud(tgt_path);
  const bcreg::FeatureBackend backend = backend_from_flag(backend_flag, seed);

  bcreg::PipelineConfig cfg;
  cfg.k = k;
  cfg.denoise_p = p;
  cfg.tau = tau;
  cfg.refine = !no_refine;
  cfg.keep_consensus = !dump_consensus.empty();

  bcreg::RegistrationResult result;
  try {
    result = bcreg::register_clouds(source, target, backend, cfg);
  } catch (const std::exception& e) {
    std::cerr << "registration failed: " << e.what() << "\n";
    return kExitRegistrationFailed;
  }
  if (result.failed) {
    std::cerr << "registration failed: " << result.error << "\n";
    return kExitRegistrationFailed;
  }
  if (!result.error.empty()) {
    std::cerr << "warning: refinement skipped: " << result.error << "\n";
  }

  if (!dump_consensus.empty() && result.consensus) {
    std::ofstream out(dump_consensus);
    if (!out) throw std::runtime_error("cannot write " + dump_consensus);
    bcreg::write_consensus_csv(out, *result.consensus);
  }

  nlohmann::ordered_json j = transform_json(result.final_transform());
  j["residual"] = result.residual;
  j["k"] = result.matches.k();
  std::vector<double> confidences;
  confidences.reserve(result.matches.pairs.size());
  for (const auto& m : result.matches.pairs) confidences.push_back(m.confidence);
  j["confidences"] = confidences;
  j["low_confidence"] = result.low_confidence;
  j["coarse"] = transform_json(result.coarse);
  if (result.refined) j["refined"] = transform_json(*result.refined);
  if (!gt_path.empty()) {
    const bcreg::RigidTransform gt = bcreg::load_transform_json(gt_path);
    const bcreg::RigidTransform& pred = result.final_transform();
    j["re_deg"] = bcreg::rotation_error_deg(gt.rotation, pred.rotation);
    j["te"] = bcreg::translation_error(gt.translation, pred.translation);
  }
  emit_json(j, out_path);
  return kExitOk;
}

int run_bench(const std::string& config_path, const std::string& out_csv,
              const std::string& out_json, const std::string& backend_flag) {
  bcreg::ExperimentConfig cfg;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot open config: " + config_path);
    cfg = experiment_from_json(nlohmann::json::parse(in));
  }
  const bcreg::FeatureBackend backend = backend_from_flag(backend_flag, cfg.seed);
  const std::vector<bcreg::Method> methods{bcreg::Method::kCoarse, bcreg::Method::kRefined};

  std::ofstream csv(out_csv);
  if (!csv) throw std::runtime_error("cannot write " + out_csv);
  if (cfg.k_sweep.empty()) {
    const bcreg::BenchmarkReport report = bcreg::run_benchmark(cfg, backend, methods);
    bcreg::write_report_csv(csv, report);
    if (!out_json.empty()) {
      std::ofstream js(out_json);
      if (!js) throw std::runtime_error("cannot write " + out_json);
      bcreg::write_report_json(js, report);
    }
  } else {
    const auto sweep = bcreg::run_k_sweep(cfg, backend, methods);
    bcreg::write_k_sweep_csv(csv, sweep);
  }
  return kExitOk;
}

int run_gen(const std::string& shape, int n, const std::string& out_path, std::uint64_t seed) {
  const bcreg::PointCloud c = bcreg::generate_cloud(bcreg::shape_from_name(shape), n, seed);
  bcreg::write_xyz_file(out_path, c);
  return kExitOk;
}

int run_icp(const std::string& src_path, const std::string& tgt_path, int max_iter,
            const std::string& out_path) {
  const bcreg::PointCloud source = bcreg::parse_cloud(src_path);
  const bcreg::PointCloud target = bcreg::parse_cloud(tgt_path);
  bcreg::IcpConfig cfg;
  cfg.max_iterations = max_iter;
  bcreg::RegistrationResult result;
  try {
    result = bcreg::icp(source, target, cfg);
  } catch (const std::exception& e) {
    std::cerr << "icp failed: " << e.what() << "\n";
    return kExitRegistrationFailed;
  }

  nlohmann::ordered_json j = transform_json(result.coarse);
  j["residual"] = result.residual;
  j["iterations"] = result.iterations;
  emit_json(j, out_path);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coarse-to-fine global point cloud registration"};
  app.require_subcommand(1);

  // register
  auto* reg = app.add_subcommand("register", "register a source cloud onto a target cloud");
  std::string reg_src, reg_tgt, reg_backend = "handcrafted", reg_out, reg_gt, reg_dump;
  int reg_k = 128, reg_p = 15;
  double reg_tau = bcreg::kSharpUnitNormTau;
  bool reg_no_refine = false;
  std::uint64_t reg_seed = 0;
  reg->add_option("src", reg_src, "source cloud (.xyz or ascii .ply)")->required();
  reg->add_option("tgt", reg_tgt, "target cloud (.xyz or ascii .ply)")->required();
  reg->add_option("--backend", reg_backend, "oracle | handcrafted | file:<src>[,<tgt>]");
  reg->add_option("--k", reg_k, "correspondences selected by softmax pooling");
  reg->add_option("--p", reg_p, "denoising neighborhood size");
  reg->add_option("--tau", reg_tau, "consensus softmax temperature");
  reg->add_flag("--no-refine", reg_no_refine, "skip the denoising refinement stage");
  reg->add_option("--out", reg_out, "write the result JSON here (default: stdout)");
  reg->add_option("--gt", reg_gt, "ground-truth transform JSON; adds RE/TE to the output");
  reg->add_option("--dump-consensus", reg_dump, "write the consensus matrix as CSV");
  reg->add_option("--seed", reg_seed, "seed for seeded backends");

  // bench
  auto* bench = app.add_subcommand("bench", "run the synthetic rotation benchmark");
  std::string bench_config, bench_out = "report.csv", bench_json, bench_backend = "oracle";
  bench->add_option("--config", bench_config, "experiment config JSON");
  bench->add_option("--out", bench_out, "report CSV path");
  bench->add_option("--json", bench_json, "JSON summary mirror path");
  bench->add_option("--backend", bench_backend, "oracle | handcrafted | file:<src>[,<tgt>]");

  // gen
  auto* gen = app.add_subcommand("gen", "generate a synthetic cloud");
  std::string gen_shape, gen_out;
  int gen_n = 1024;
  std::uint64_t gen_seed = 0;
  gen->add_option("shape", gen_shape, "box | blobs | lshape | surface")->required();
  gen->add_option("n", gen_n, "number of points")->required();
  gen->add_option("out", gen_out, "output .xyz path")->required();
  gen->add_option("--seed", gen_seed, "generator seed");

  // icp
  auto* icp_cmd = app.add_subcommand("icp", "point-to-point ICP baseline");
  std::string icp_src, icp_tgt, icp_out;
  int icp_max_iter = 50;
  icp_cmd->add_option("src", icp_src, "source cloud")->required();
  icp_cmd->add_option("tgt", icp_tgt, "target cloud")->required();
  icp_cmd->add_option("--max-iter", icp_max_iter, "iteration cap");
  icp_cmd->add_option("--out", icp_out, "write the result JSON here (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (reg->parsed()) {
      return run_register(reg_src, reg_tgt, reg_backend, reg_k, reg_p, reg_tau, reg_no_refine,
                          reg_out, reg_gt, reg_dump, reg_seed);
    }
    if (bench->parsed()) {
      return run_bench(bench_config, bench_out, bench_json, bench_backend);
    }
    if (gen->parsed()) {
      return run_gen(gen_shape, gen_n, gen_out, gen_seed);
    }
    if (icp_cmd->parsed()) {
      return run_icp(icp_src, icp_tgt, icp_max_iter, icp_out);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRegistrationFailed;
  }
  return kExitUsage;
}
