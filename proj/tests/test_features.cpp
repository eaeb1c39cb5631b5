#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <numeric>

#include "bcreg/features.hpp"
#include "test_util.hpp"

using namespace bcreg;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("oracle features are identical across corresponding points") {
  const PointCloud c = test::random_cloud(128, 1);
  const PointCloud rotated = apply_transform(test::random_transform(2), c);
  const FeatureBackend b = FeatureBackend::oracle(42);

  const FeatureSet fa = extract_features(b, c);
  const FeatureSet fb = extract_features(b, rotated);
  CHECK((fa.vectors - fb.vectors).cwiseAbs().maxCoeff() == 0.0);

  // explicit ids override the index labeling
  std::vector<int> ids(c.size());
  std::iota(ids.begin(), ids.end(), 1000);
  const FeatureSet fc = extract_features(b, c, ids);
  CHECK((fa.vectors - fc.vectors).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("oracle features are unit norm and deterministic") {
  const PointCloud c = test::random_cloud(64, 3);
  const FeatureSet f1 = extract_features(FeatureBackend::oracle(7), c);
  const FeatureSet f2 = extract_features(FeatureBackend::oracle(7), c);
  CHECK((f1.vectors - f2.vectors).cwiseAbs().maxCoeff() == 0.0);
  for (long i = 0; i < f1.count(); ++i) {
    CHECK(f1.vectors.row(i).norm() == doctest::Approx(1.0).epsilon(1e-9));
  }
  const FeatureSet f3 = extract_features(FeatureBackend::oracle(8), c);
  CHECK((f1.vectors - f3.vectors).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("handcrafted features are invariant under rigid transforms") {
  const PointCloud c = test::random_cloud(512, 4);
  const auto [normalized, rec] = normalize_to_box(c);
  const FeatureBackend b = FeatureBackend::handcrafted();
  const FeatureSet fa = extract_features(b, normalized);

  for (int t = 0; t < 10; ++t) {
    const PointCloud moved = apply_transform(test::random_transform(500 + t), normalized);
    const FeatureSet fb = extract_features(b, moved);
    for (long i = 0; i < fa.count(); ++i) {
      const double cosine = fa.vectors.row(i).dot(fb.vectors.row(i));
      CHECK(cosine >= 0.999);
    }
  }
}

TEST_CASE("handcrafted features have the documented dimension") {
  const PointCloud c = test::random_cloud(64, 5);
  const FeatureSet f = extract_features(FeatureBackend::handcrafted(), c);
  CHECK(f.dim() == 36);  // 3 radii x (8 bins + 3 eigenvalues + 1 count)
  CHECK(f.count() == 64);
}

TEST_CASE("handcrafted features tolerate empty neighborhoods") {
  PointCloud sparse;
  sparse.points.emplace_back(0.0, 0.0, 0.0);
  sparse.points.emplace_back(10.0, 0.0, 0.0);
  sparse.points.emplace_back(0.0, 10.0, 0.0);
  const FeatureSet f = extract_features(FeatureBackend::handcrafted(), sparse);
  for (long i = 0; i < f.count(); ++i) {
    CHECK(f.vectors.row(i).norm() == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("precomputed features round trip bit-identically") {
  const PointCloud c = test::random_cloud(40, 6);
  const FeatureSet f = extract_features(FeatureBackend::oracle(11), c);
  const std::string path = temp_path("bcreg_feats_roundtrip.txt");
  save_feature_file(path, f);

  const FeatureSet loaded = extract_features(FeatureBackend::precomputed(path), c);
  REQUIRE(loaded.count() == f.count());
  REQUIRE(loaded.dim() == f.dim());
  for (long i = 0; i < f.count(); ++i) {
    for (long j = 0; j < f.dim(); ++j) {
      CHECK(loaded.vectors(i, j) == f.vectors(i, j));
    }
  }
  std::remove(path.c_str());
}

TEST_CASE("precomputed features reject count mismatches") {
  const PointCloud c = test::random_cloud(40, 7);
  const FeatureSet f = extract_features(FeatureBackend::oracle(12), c);
  const std::string path = temp_path("bcreg_feats_mismatch.txt");
  save_feature_file(path, f);

  const PointCloud shorter = test::random_cloud(39, 8);
  CHECK_THROWS_AS(extract_features(FeatureBackend::precomputed(path), shorter),
                  std::invalid_argument);
  std::remove(path.c_str());
}

TEST_CASE("feature file loader rejects malformed input") {
  const std::string path = temp_path("bcreg_feats_bad.txt");
  {
    std::FILE* f = std::fopen(path.c_str(), "w");
    std::fputs("D 3 N 2\n1 0 0\n", f);  // truncated second row
    std::fclose(f);
  }
  CHECK_THROWS(load_feature_file(path));
  std::remove(path.c_str());
}

TEST_CASE("interpolation collapses onto coincident subsampled points") {
  const PointCloud sub = test::random_cloud(32, 9);
  const FeatureSet sub_feats = extract_features(FeatureBackend::oracle(13), sub);

  PointCloud dense;
  dense.points.push_back(sub.points[5]);
  dense.points.push_back(sub.points[17]);
  const FeatureSet out = interpolate_features(sub, sub_feats, dense);
  CHECK((out.vectors.row(0) - sub_feats.vectors.row(5)).norm() < 1e-6);
  CHECK((out.vectors.row(1) - sub_feats.vectors.row(17)).norm() < 1e-6);
}

TEST_CASE("interpolation weights match the hand-computed IDW case") {
  // two near points at distance 0.1 and one far point at 0.3 from the query
  PointCloud sub;
  sub.points.emplace_back(0.1, 0.0, 0.0);
  sub.points.emplace_back(-0.1, 0.0, 0.0);
  sub.points.emplace_back(0.0, 0.3, 0.0);
  Eigen::MatrixXd vecs(3, 3);
  vecs << 1, 0, 0,
          0, 1, 0,
          0, 0, 1;
  const FeatureSet sub_feats{vecs};

  PointCloud dense;
  dense.points.emplace_back(0.0, 0.0, 0.0);
  const FeatureSet out = interpolate_features(sub, sub_feats, dense);

  const double eps = 1e-8;
  const double w1 = 1.0 / (0.1 + eps);
  const double w3 = 1.0 / (0.3 + eps);
  const double z = 2.0 * w1 + w3;
  Eigen::Vector3d expected(w1 / z, w1 / z, w3 / z);
  expected.normalize();
  CHECK((out.vectors.row(0).transpose() - expected).norm() < 1e-9);
}

TEST_CASE("interpolation of identical features returns those features") {
  PointCloud sub = test::random_cloud(10, 10);
  Eigen::MatrixXd vecs(10, 4);
  for (int i = 0; i < 10; ++i) vecs.row(i) << 0.5, 0.5, 0.5, 0.5;
  const PointCloud dense = test::random_cloud(20, 11);
  const FeatureSet out = interpolate_features(sub, {vecs}, dense);
  for (long i = 0; i < out.count(); ++i) {
    CHECK((out.vectors.row(i) - vecs.row(0)).norm() < 1e-12);
  }
}

TEST_CASE("interpolation needs at least three subsampled points") {
  PointCloud sub = test::random_cloud(2, 12);
  Eigen::MatrixXd vecs = Eigen::MatrixXd::Identity(2, 2);
  CHECK_THROWS_AS(interpolate_features(sub, {vecs}, sub), std::invalid_argument);
}
