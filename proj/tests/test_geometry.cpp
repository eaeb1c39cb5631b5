#include <doctest.h>

#include <cmath>

#include <Eigen/Geometry>

#include "bcreg/geometry.hpp"
#include "bcreg/rng.hpp"
#include "test_util.hpp"

using namespace bcreg;

TEST_CASE("apply_transform identity returns the same cloud") {
  const PointCloud c = test::random_cloud(50, 1);
  const PointCloud out = apply_transform(RigidTransform{}, c);
  REQUIRE(out.size() == c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK((out.points[i] - c.points[i]).norm() == doctest::Approx(0.0));
  }
}

TEST_CASE("apply_transform rotates 90 degrees about z") {
  RigidTransform t;
  t.rotation = axis_rotation(Axis::kZ, 90.0);
  PointCloud c;
  c.points.emplace_back(1.0, 0.0, 0.0);
  const PointCloud out = apply_transform(t, c);
  CHECK(out.points[0].x() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(out.points[0].y() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(out.points[0].z() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("transform composition matches direct matrix algebra") {
  for (int trial = 0; trial < 10; ++trial) {
    const PointCloud c = test::random_cloud(20, 100 + trial);
    const RigidTransform t1 = test::random_transform(200 + trial);
    const RigidTransform t2 = test::random_transform(300 + trial);

    const PointCloud seq = apply_transform(t2, apply_transform(t1, c));
    const PointCloud joined = apply_transform(compose(t2, t1), c);

    // oracle: composed map computed by hand from the matrices
    const Eigen::Matrix3d r = t2.rotation * t1.rotation;
    const Eigen::Vector3d t = t2.rotation * t1.translation + t2.translation;
    for (std::size_t i = 0; i < c.size(); ++i) {
      const Eigen::Vector3d expected = r * c.points[i] + t;
      CHECK((seq.points[i] - expected).norm() < 1e-12);
      CHECK((joined.points[i] - expected).norm() < 1e-12);
    }
  }
}

TEST_CASE("apply_transform preserves pairwise distances") {
  const PointCloud c = test::random_cloud(64, 2);
  const PointCloud out = apply_transform(test::random_transform(3), c);
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (std::size_t j = i + 1; j < c.size(); j += 7) {
      const double before = (c.points[i] - c.points[j]).norm();
      const double after = (out.points[i] - out.points[j]).norm();
      CHECK(std::abs(after - before) <= 1e-9 * std::max(1.0, before));
    }
  }
}

TEST_CASE("rotation_error basics") {
  const Eigen::Matrix3d id = Eigen::Matrix3d::Identity();
  CHECK(rotation_error_deg(id, id) == doctest::Approx(0.0));

  const Eigen::Matrix3d rz180 = axis_rotation(Axis::kZ, 180.0);
  CHECK(rotation_error_deg(id, rz180) == doctest::Approx(180.0).epsilon(1e-9));

  Rng rng(42);
  for (int i = 0; i < 5; ++i) {
    const Eigen::Vector3d axis = rng.gaussian_vec3().normalized();
    const Eigen::Matrix3d r45 = Eigen::AngleAxisd(45.0 * kDegToRad, axis).toRotationMatrix();
    CHECK(rotation_error_deg(id, r45) == doctest::Approx(45.0).epsilon(1e-9));
  }
}

TEST_CASE("rotation_error is symmetric and recovers axis-angle magnitudes") {
  Rng rng(7);
  for (double theta : {1.0, 45.0, 90.0, 135.0, 180.0}) {
    const Eigen::Matrix3d r = test::random_rotation(rng);
    const Eigen::Vector3d axis = rng.gaussian_vec3().normalized();
    const Eigen::Matrix3d r_axis = Eigen::AngleAxisd(theta * kDegToRad, axis).toRotationMatrix();
    // arccos loses ~sqrt(eps) of angle resolution at the 0/180 endpoints, so
    // the gate is absolute rather than relative
    CHECK(std::abs(rotation_error_deg(r, r * r_axis) - theta) < 1e-5);
    CHECK(rotation_error_deg(r * r_axis, r) ==
          doctest::Approx(rotation_error_deg(r, r * r_axis)).epsilon(1e-12));
  }
}

TEST_CASE("translation_error") {
  const Eigen::Vector3d zero = Eigen::Vector3d::Zero();
  CHECK(translation_error({1, 2, 3}, {1, 2, 3}) == doctest::Approx(0.0));
  CHECK(translation_error(zero, {1, 0, 0}) == doctest::Approx(1.0));
  CHECK(translation_error(zero, {1, 2, 2}) == doctest::Approx(3.0));
}

TEST_CASE("normalize_to_box maps a unit cube to the [-2,2] box") {
  PointCloud cube;
  for (int i = 0; i < 8; ++i) {
    cube.points.emplace_back(i & 1 ? 1.0 : -1.0, i & 2 ? 1.0 : -1.0, i & 4 ? 1.0 : -1.0);
  }
  const auto [out, rec] = normalize_to_box(cube);
  CHECK(rec.scale == doctest::Approx(2.0));
  for (const auto& p : out.points) {
    CHECK(p.cwiseAbs().maxCoeff() == doctest::Approx(2.0));
  }
}

TEST_CASE("normalize_to_box leaves an already-normalized cloud at scale 1") {
  PointCloud c;
  c.points.emplace_back(-2.0, 0.0, 0.0);
  c.points.emplace_back(2.0, 0.0, 0.0);
  c.points.emplace_back(0.0, 1.0, -1.0);
  const auto [out, rec] = normalize_to_box(c);
  CHECK(rec.scale == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("normalize_to_box round trip recovers the input") {
  const PointCloud c = test::random_cloud(200, 11, 37.5);
  const auto [normalized, rec] = normalize_to_box(c);
  for (const auto& p : normalized.points) {
    CHECK(p.cwiseAbs().maxCoeff() <= 2.0 + 1e-12);
  }
  const PointCloud back = denormalize(normalized, rec);
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK((back.points[i] - c.points[i]).norm() <= 1e-12 * std::max(1.0, c.points[i].norm()));
  }
}

TEST_CASE("normalize_to_box rejects degenerate clouds") {
  PointCloud same;
  same.points.assign(5, Eigen::Vector3d(1.0, 2.0, 3.0));
  CHECK_THROWS_AS(normalize_to_box(same), std::invalid_argument);
  PointCloud empty;
  CHECK_THROWS_AS(normalize_to_box(empty), std::invalid_argument);
}

TEST_CASE("random_rigid_transform") {
  SUBCASE("angle zero is the identity") {
    const RigidTransform t = random_rigid_transform(0.0, AxisSet::xyz(), 5);
    CHECK((t.rotation - Eigen::Matrix3d::Identity()).norm() < 1e-12);
    CHECK(t.translation.norm() == 0.0);
  }
  SUBCASE("exact 90 about z has rotation error 90 vs identity") {
    const RigidTransform t = random_rigid_transform(90.0, AxisSet::z_only(), 5, true);
    CHECK(rotation_error_deg(Eigen::Matrix3d::Identity(), t.rotation) ==
          doctest::Approx(90.0).epsilon(1e-9));
  }
  SUBCASE("deterministic per seed") {
    const RigidTransform a = random_rigid_transform(120.0, AxisSet::xyz(), 99);
    const RigidTransform b = random_rigid_transform(120.0, AxisSet::xyz(), 99);
    CHECK((a.rotation - b.rotation).norm() == 0.0);
    const RigidTransform c = random_rigid_transform(120.0, AxisSet::xyz(), 100);
    CHECK((a.rotation - c.rotation).norm() > 0.0);
  }
  SUBCASE("outputs are valid rotations") {
    for (int seed = 0; seed < 20; ++seed) {
      const RigidTransform t = random_rigid_transform(175.0, AxisSet::xyz(), seed);
      CHECK(is_rotation(t.rotation));
    }
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(random_rigid_transform(90.0, AxisSet{}, 0), std::invalid_argument);
    CHECK_THROWS_AS(random_rigid_transform(-1.0, AxisSet::z_only(), 0), std::invalid_argument);
    CHECK_THROWS_AS(random_rigid_transform(181.0, AxisSet::z_only(), 0), std::invalid_argument);
  }
}
