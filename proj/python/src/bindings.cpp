#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "bcreg/cloud_io.hpp"
#include "bcreg/evaluation.hpp"
#include "bcreg/icp.hpp"
#include "bcreg/refinement.hpp"
#include "bcreg/registration.hpp"

namespace py = pybind11;
using namespace bcreg;

namespace {

using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

PointCloud cloud_from_matrix(const Eigen::Ref<const PointMatrix>& m) {
  PointCloud c;
  c.points.reserve(m.rows());
  for (long i = 0; i < m.rows(); ++i) c.points.push_back(m.row(i).transpose());
  return c;
}

PointMatrix cloud_to_matrix(const PointCloud& c) {
  PointMatrix m(c.size(), 3);
  for (std::size_t i = 0; i < c.size(); ++i) m.row(i) = c.points[i].transpose();
  return m;
}

AxisSet axes_from_string(const std::string& axes) {
  AxisSet s;
  for (char ch : axes) {
    if (ch == 'x') s.x = true;
    else if (ch == 'y') s.y = true;
    else if (ch == 'z') s.z = true;
    else throw std::invalid_argument("axes must be a combination of 'x', 'y', 'z'");
  }
  if (s.empty()) throw std::invalid_argument("axes must not be empty");
  return s;
}

py::list matches_to_list(const MatchSet& ms) {
  py::list out;
  for (const Match& m : ms.pairs) {
    out.append(py::make_tuple(m.source_index, m.target_index, m.confidence));
  }
  return out;
}

std::vector<Method> methods_from_names(const std::vector<std::string>& names) {
  std::vector<Method> methods;
  methods.reserve(names.size());
  for (const auto& n : names) methods.push_back(method_from_name(n));
  return methods;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "coarse-to-fine global point cloud registration";

  py::class_<PointCloud>(m, "PointCloud")
      .def(py::init([](const Eigen::Ref<const PointMatrix>& pts, const std::string& id) {
             PointCloud c = cloud_from_matrix(pts);
             c.id = id;
             return c;
           }),
           py::arg("points"), py::arg("id") = "")
      .def_property_readonly("points", &cloud_to_matrix)
      .def_readwrite("id", &PointCloud::id)
      .def("__len__", &PointCloud::size)
      .def("centroid", &PointCloud::centroid);

  py::class_<RigidTransform>(m, "RigidTransform")
      .def(py::init<>())
      .def(py::init([](const Eigen::Matrix3d& r, const Eigen::Vector3d& t) {
             RigidTransform tf;
             tf.rotation = r;
             tf.translation = t;
             return tf;
           }),
           py::arg("rotation"), py::arg("translation"))
      .def_readwrite("rotation", &RigidTransform::rotation)
      .def_readwrite("translation", &RigidTransform::translation)
      .def("apply", &RigidTransform::apply, py::arg("point"));

  py::class_<NormalizationRecord>(m, "NormalizationRecord")
      .def_readonly("scale", &NormalizationRecord::scale)
      .def_readonly("offset", &NormalizationRecord::offset);

  py::class_<FeatureBackend>(m, "FeatureBackend")
      .def_static("oracle", &FeatureBackend::oracle, py::arg("seed"), py::arg("dim") = 32)
      .def_static("handcrafted", &FeatureBackend::handcrafted)
      .def_static("precomputed", &FeatureBackend::precomputed, py::arg("source_path"),
                  py::arg("target_path") = "");

  py::class_<PipelineConfig>(m, "PipelineConfig")
      .def(py::init<>())
      .def_readwrite("input_size", &PipelineConfig::input_size)
      .def_readwrite("mid_size", &PipelineConfig::mid_size)
      .def_readwrite("match_size", &PipelineConfig::match_size)
      .def_readwrite("k", &PipelineConfig::k)
      .def_readwrite("tau", &PipelineConfig::tau)
      .def_readwrite("refine", &PipelineConfig::refine)
      .def_readwrite("denoise_p", &PipelineConfig::denoise_p)
      .def_readwrite("denoise_tau", &PipelineConfig::denoise_tau)
      .def_readwrite("low_confidence_factor", &PipelineConfig::low_confidence_factor)
      .def_readwrite("keep_consensus", &PipelineConfig::keep_consensus);

  py::class_<DenoiseConfig>(m, "DenoiseConfig")
      .def(py::init<>())
      .def_readwrite("p", &DenoiseConfig::p)
      .def_readwrite("temperature", &DenoiseConfig::temperature)
      .def_readwrite("pre_transform_lookup", &DenoiseConfig::pre_transform_lookup);

  py::class_<IcpConfig>(m, "IcpConfig")
      .def(py::init<>())
      .def_readwrite("max_iterations", &IcpConfig::max_iterations)
      .def_readwrite("convergence_tol", &IcpConfig::convergence_tol)
      .def_readwrite("max_correspondence_distance", &IcpConfig::max_correspondence_distance);

  py::class_<RegistrationResult>(m, "RegistrationResult")
      .def_readonly("coarse", &RegistrationResult::coarse)
      .def_property_readonly("refined",
                             [](const RegistrationResult& r) -> py::object {
                               if (!r.refined) return py::none();
                               return py::cast(*r.refined);
                             })
      .def_property_readonly("matches",
                             [](const RegistrationResult& r) { return matches_to_list(r.matches); })
      .def_readonly("residual", &RegistrationResult::residual)
      .def_readonly("max_confidence", &RegistrationResult::max_confidence)
      .def_readonly("low_confidence", &RegistrationResult::low_confidence)
      .def_readonly("failed", &RegistrationResult::failed)
      .def_readonly("error", &RegistrationResult::error)
      .def_readonly("iterations", &RegistrationResult::iterations)
      .def_readonly("cost_history", &RegistrationResult::cost_history)
      .def_readonly("source_match_indices", &RegistrationResult::source_match_indices)
      .def_readonly("target_match_indices", &RegistrationResult::target_match_indices)
      .def_property_readonly("final_transform",
                             [](const RegistrationResult& r) { return r.final_transform(); });

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_readwrite("rotation_levels", &ExperimentConfig::rotation_levels)
      .def_readwrite("trials_per_level", &ExperimentConfig::trials_per_level)
      .def_readwrite("noise_sigma", &ExperimentConfig::noise_sigma)
      .def_readwrite("base_points", &ExperimentConfig::base_points)
      .def_readwrite("subset_points", &ExperimentConfig::subset_points)
      .def_readwrite("k_sweep", &ExperimentConfig::k_sweep)
      .def_readwrite("seed", &ExperimentConfig::seed)
      .def_readwrite("pipeline", &ExperimentConfig::pipeline)
      .def_property(
          "axes",
          [](const ExperimentConfig& c) {
            return c.axes_mode == AxesMode::kZOnly ? "z" : "xyz";
          },
          [](ExperimentConfig& c, const std::string& axes) {
            if (axes == "z") c.axes_mode = AxesMode::kZOnly;
            else if (axes == "xyz") c.axes_mode = AxesMode::kXyzSequential;
            else throw std::invalid_argument("axes must be 'z' or 'xyz'");
          })
      .def_property(
          "pairing",
          [](const ExperimentConfig& c) {
            return c.pairing == PairingMode::kExactCopy ? "exact-copy" : "disjoint";
          },
          [](ExperimentConfig& c, const std::string& pairing) {
            if (pairing == "exact-copy") c.pairing = PairingMode::kExactCopy;
            else if (pairing == "disjoint") c.pairing = PairingMode::kDisjointSubsets;
            else throw std::invalid_argument("pairing must be 'exact-copy' or 'disjoint'");
          })
      .def_property(
          "shape", [](const ExperimentConfig& c) { return shape_name(c.shape); },
          [](ExperimentConfig& c, const std::string& s) { c.shape = shape_from_name(s); });

  py::class_<BenchmarkReport>(m, "BenchmarkReport")
      .def_property_readonly("rows",
                             [](const BenchmarkReport& r) {
                               py::list rows;
                               for (const LevelAggregate& a : r.rows) {
                                 py::dict d;
                                 d["level"] = a.level;
                                 d["method"] = a.method;
                                 d["n"] = a.n;
                                 d["n_fail"] = a.n_fail;
                                 d["mean_re"] = a.mean_re;
                                 d["std_re"] = a.std_re;
                                 d["median_re"] = a.median_re;
                                 d["mean_te"] = a.mean_te;
                                 d["std_te"] = a.std_te;
                                 d["median_te"] = a.median_te;
                                 rows.append(d);
                               }
                               return rows;
                             })
      .def("csv",
           [](const BenchmarkReport& r) {
             std::ostringstream os;
             write_report_csv(os, r);
             return os.str();
           })
      .def("json", [](const BenchmarkReport& r) {
        std::ostringstream os;
        write_report_json(os, r);
        return os.str();
      });

  // geometry
  m.def("apply_transform", &apply_transform, py::arg("transform"), py::arg("cloud"));
  m.def("compose", &compose, py::arg("outer"), py::arg("inner"));
  m.def("inverse", &inverse, py::arg("transform"));
  m.def("is_rotation", &is_rotation, py::arg("rotation"), py::arg("tol") = 1e-9);
  m.def("rotation_error_deg", &rotation_error_deg, py::arg("r_gt"), py::arg("r_pred"));
  m.def("translation_error", &translation_error, py::arg("t_gt"), py::arg("t_pred"));
  m.def("normalize_to_box", &normalize_to_box, py::arg("cloud"));
  m.def("denormalize", &denormalize, py::arg("cloud"), py::arg("record"));
  m.def(
      "random_rigid_transform",
      [](double angle_deg, const std::string& axes, std::uint64_t seed, bool exact_angles) {
        return random_rigid_transform(angle_deg, axes_from_string(axes), seed, exact_angles);
      },
      py::arg("angle_deg"), py::arg("axes") = "xyz", py::arg("seed") = 0,
      py::arg("exact_angles") = false);

  // sampling
  m.def("farthest_point_sampling", &farthest_point_sampling, py::arg("cloud"), py::arg("n"),
        py::arg("start") = 0);
  m.def("p_nearest_neighbors", &p_nearest_neighbors, py::arg("cloud"), py::arg("query"),
        py::arg("p"));
  m.def("radius_neighbors", &radius_neighbors, py::arg("cloud"), py::arg("query"),
        py::arg("radius"));
  m.def("random_subset", &random_subset, py::arg("cloud"), py::arg("n"), py::arg("seed") = 0);

  // features
  m.def(
      "extract_features",
      [](const FeatureBackend& b, const PointCloud& c, const std::vector<int>& ids) {
        return extract_features(b, c, ids).vectors;
      },
      py::arg("backend"), py::arg("cloud"), py::arg("correspondence_ids") = std::vector<int>{});
  m.def(
      "interpolate_features",
      [](const PointCloud& sub, const Eigen::MatrixXd& sub_feats, const PointCloud& dense) {
        return interpolate_features(sub, {sub_feats}, dense).vectors;
      },
      py::arg("sub_points"), py::arg("sub_features"), py::arg("dense_points"));

  // matching
  m.def(
      "similarity_matrix",
      [](const Eigen::MatrixXd& fx, const Eigen::MatrixXd& fy) {
        return similarity_matrix({fx}, {fy});
      },
      py::arg("fx"), py::arg("fy"));
  m.def("bilateral_consensus", &bilateral_consensus, py::arg("similarity"),
        py::arg("temperature") = 1.0);
  m.def(
      "softmax_pool_top_k",
      [](const ConsensusMatrix& c, int k) { return matches_to_list(softmax_pool_top_k(c, k)); },
      py::arg("consensus"), py::arg("k"));
  m.attr("SHARP_UNIT_NORM_TAU") = kSharpUnitNormTau;

  // registration
  m.def(
      "weighted_procrustes",
      [](const Eigen::Ref<const PointMatrix>& src, const Eigen::Ref<const PointMatrix>& tgt,
         const std::vector<double>& weights) {
        WeightedPairs p;
        p.source = cloud_from_matrix(src).points;
        p.target = cloud_from_matrix(tgt).points;
        p.weights = weights.empty() ? std::vector<double>(p.source.size(), 1.0) : weights;
        return weighted_procrustes(p);
      },
      py::arg("source"), py::arg("target"), py::arg("weights") = std::vector<double>{});
  m.def("register_clouds", &register_clouds, py::arg("source"), py::arg("target"),
        py::arg("backend"), py::arg("config") = PipelineConfig{},
        py::arg("source_ids") = std::vector<int>{}, py::arg("target_ids") = std::vector<int>{});
  m.def("coarse_register", &coarse_register, py::arg("source"), py::arg("target"),
        py::arg("backend"), py::arg("config") = PipelineConfig{},
        py::arg("source_ids") = std::vector<int>{}, py::arg("target_ids") = std::vector<int>{});

  // refinement
  m.def(
      "target_guided_denoise",
      [](const Eigen::Ref<const PointMatrix>& neighbor_points,
         const Eigen::MatrixXd& neighbor_features, const Eigen::VectorXd& target_feature,
         const DenoiseConfig& cfg) {
        NeighborhoodBundle b;
        b.neighbor_points = cloud_from_matrix(neighbor_points).points;
        b.neighbor_features = neighbor_features;
        b.target_feature = target_feature;
        return target_guided_denoise(b, cfg);
      },
      py::arg("neighbor_points"), py::arg("neighbor_features"), py::arg("target_feature"),
      py::arg("config") = DenoiseConfig{});
  m.def(
      "refined_register",
      [](const RegistrationResult& coarse, const PointCloud& source_sub,
         const PointCloud& target_sub, const PointCloud& source_dense,
         const Eigen::MatrixXd& source_dense_feats, const Eigen::MatrixXd& target_sub_feats,
         const DenoiseConfig& cfg) {
        return refined_register(coarse, source_sub, target_sub, source_dense,
                                {source_dense_feats}, {target_sub_feats}, cfg);
      },
      py::arg("coarse"), py::arg("source_sub"), py::arg("target_sub"), py::arg("source_dense"),
      py::arg("source_dense_features"), py::arg("target_sub_features"),
      py::arg("config") = DenoiseConfig{});

  // baselines and evaluation
  m.def("icp", &icp, py::arg("source"), py::arg("target"), py::arg("config") = IcpConfig{});
  m.def("loss_rot", &loss_rot, py::arg("r_gt"), py::arg("r_pred"));
  m.def("loss_trans", &loss_trans, py::arg("t_gt"), py::arg("t_pred"));
  m.def(
      "combined_loss",
      [](std::pair<double, double> coarse, std::pair<double, double> refined, double lambda) {
        return combined_loss({coarse.first, coarse.second}, {refined.first, refined.second},
                             lambda);
      },
      py::arg("coarse"), py::arg("refined"), py::arg("lambda_") = 0.6);
  m.def(
      "generate_cloud",
      [](const std::string& shape, int n, std::uint64_t seed) {
        return generate_cloud(shape_from_name(shape), n, seed);
      },
      py::arg("shape"), py::arg("n"), py::arg("seed") = 0);
  m.def(
      "run_benchmark",
      [](const ExperimentConfig& cfg, const FeatureBackend& backend,
         const std::vector<std::string>& methods) {
        return run_benchmark(cfg, backend, methods_from_names(methods));
      },
      py::arg("config"), py::arg("backend"),
      py::arg("methods") = std::vector<std::string>{"coarse", "refined"});
  m.attr("BENCHMARK_NOISE_SIGMA") = kBenchmarkNoiseSigma;

  // io
  m.def(
      "parse_cloud", [](const std::string& path) { return parse_cloud(path); }, py::arg("path"));
  m.def("write_xyz_file", &write_xyz_file, py::arg("path"), py::arg("cloud"));
  m.def("load_transform_json", &load_transform_json, py::arg("path"));
  m.def("save_transform_json", &save_transform_json, py::arg("path"), py::arg("transform"));

  m.attr("__version__") = "0.1.0";
}
