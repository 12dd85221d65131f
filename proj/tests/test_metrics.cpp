#include <cmath>
#include <random>

#include "check.hpp"
#include "fixtures.hpp"
#include "shapepose/metrics.hpp"

using namespace shapepose;

TEST_CASE("diameter") {
  PointList corners;
  for (int i = 0; i < 8; ++i) corners.emplace_back(i & 1, (i >> 1) & 1, (i >> 2) & 1);
  CHECK(std::abs(diameter(corners) - std::sqrt(3.0)) < 1e-15);
  CHECK(diameter(PointList{{0, 0, 0}, {3, 4, 0}}) == 5.0);
  CHECK_ERROR_KIND(diameter(PointList{{0, 0, 0}}), ErrorKind::TooFewPoints);

  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    PointList pts = testing::random_cloud(rng, 500, 0.5);
    // Anisotropic stretch makes the pruning bound do real work.
    for (auto& p : pts) p.x() *= 3.0;
    const double d = diameter(pts);
    CHECK(std::abs(d - testing::brute_diameter(pts)) < 1e-12);
    const Sim3Pose rigid(testing::random_rotation(rng), Eigen::Vector3d(1, -2, 0.5), 1.0);
    CHECK(std::abs(diameter(sim3_apply(rigid, pts)) - d) < 1e-12);
  }
}

TEST_CASE("directional ADD-S") {
  const PointList a = {{0, 0, 0}};
  const PointList b = {{1, 0, 0}, {5, 0, 0}};
  CHECK(add_s_directional(a, b) == 1.0);
  CHECK(add_s_directional(b, b) == 0.0);
  CHECK_ERROR_KIND(add_s_directional(PointList{}, b), ErrorKind::EmptyCloud);

  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 10; ++trial) {
    const PointList x = testing::random_cloud(rng, 300, 1.0);
    const PointList y = testing::random_cloud(rng, 300, 1.0);
    CHECK(std::abs(add_s_directional(x, y) - testing::brute_add_s(x, y)) < 1e-12);
  }
}

TEST_CASE("ADD-SB") {
  const TriMesh box = make_box(Eigen::Vector3d(1, 1, 1));
  const Sim3Pose id;
  CHECK(add_sb(box, id, box, id, 10000, 5) == 0.0);

  // Translated cube against the brute-force oracle on the same samples.
  const Sim3Pose shifted(Rotation::identity(), Eigen::Vector3d(0.1, 0, 0), 1.0);
  const PointList s = sample_surface(box, 1500, 9).points;
  const PointList p = sim3_apply(shifted, s);
  const double oracle = 0.5 * (testing::brute_add_s(p, s) + testing::brute_add_s(s, p));
  CHECK(std::abs(add_sb(box, shifted, box, id, 1500, 9) - oracle) < 1e-12);

  // Rotating a sphere about its centre leaves it in place.
  const TriMesh sphere = make_uv_sphere(0.5, 48, 96);
  std::mt19937_64 rng(47);
  const Sim3Pose rotated(testing::random_rotation(rng), Eigen::Vector3d::Zero(), 1.0);
  CHECK(add_sb(sphere, rotated, sphere, id, 10000, 3) < 0.02 * 0.5);
}

TEST_CASE("ADD-SB invariances") {
  std::mt19937_64 rng(53);
  const PointList a = testing::random_cloud(rng, 400, 0.2);
  const PointList b = testing::random_cloud(rng, 400, 0.2);
  const double base = add_sb_points(a, b);
  CHECK(std::abs(add_sb_points(b, a) - base) < 1e-15);
  const Sim3Pose common(testing::random_rotation(rng), Eigen::Vector3d(0.3, 0.1, -0.7), 1.0);
  CHECK(std::abs(add_sb_points(sim3_apply(common, a), sim3_apply(common, b)) - base) < 1e-9);
}

TEST_CASE("ADD-SB recall") {
  const std::vector<AddSbSample> zeros(4, {0.0, 1.0});
  CHECK(add_sb_recall(zeros, 0.1) == 1.0);
  const std::vector<AddSbSample> full(4, {1.0, 1.0});
  CHECK(add_sb_recall(full, 0.1) == 0.0);
  // Hand count at 10%: hits are records 0, 2, 3, 6, 8; at 5%: records 0, 3, 8.
  const std::vector<AddSbSample> mixed{{0.005, 0.2}, {0.021, 0.2}, {0.019, 0.2}, {0.0, 0.5},
                                       {0.5, 0.5},   {0.06, 0.5},  {0.04, 0.5},  {0.11, 1.0},
                                       {0.049, 1.0}, {0.2, 1.0}};
  CHECK(add_sb_recall(mixed, 0.10) == 0.5);
  CHECK(add_sb_recall(mixed, 0.05) == 0.3);
  CHECK_ERROR_KIND(add_sb_recall(std::vector<AddSbSample>{{0.0, 0.0}}, 0.1),
                   ErrorKind::NonPositiveDiameter);
}

TEST_CASE("diameter relative error") {
  CHECK(dre(2.0, 2.0) == 0.0);
  CHECK(std::abs(dre(1.05, 1.0) - 0.05) < 1e-15);
  CHECK(dre(0.5, 2.0) == 0.75);
  CHECK_ERROR_KIND(dre(1.0, 0.0), ErrorKind::NonPositiveDiameter);
  CHECK(dre_recall(std::vector<double>{0.01, 0.05, 0.2, 0.0}, 0.05) == 0.5);
}

TEST_CASE("normalized Chamfer") {
  const TriMesh box = make_box(Eigen::Vector3d(0.2, 0.1, 0.05));
  const double d = std::sqrt(0.04 + 0.01 + 0.0025);
  CHECK(chamfer_normalized(box, box, d, 5000, 1) < 1e-12);

  // ICP removes a 10 degree rotation.
  const TriMesh rotated =
      transformed(box, Sim3Pose(Rotation::from_axis_angle(Eigen::Vector3d(1, 2, 3).normalized(),
                                                          10.0 * M_PI / 180.0),
                                Eigen::Vector3d::Zero(), 1.0));
  const double no_icp = chamfer_normalized(rotated, box, d, 5000, 1, IcpParams{0, 1e-6});
  const double with_icp = chamfer_normalized(rotated, box, d, 5000, 1);
  CHECK(with_icp < 5e-3);
  CHECK(with_icp < no_icp);

  // Without ICP the value is the brute-force symmetric Chamfer over the diameter.
  const PointList p = sample_surface(rotated, 200, 4).points;
  const PointList g = sample_surface(box, 200, 4).points;
  const double oracle = 0.5 * (testing::brute_add_s(p, g) + testing::brute_add_s(g, p)) / d;
  CHECK(std::abs(chamfer_normalized(rotated, box, d, 200, 4, IcpParams{0, 1e-6}) - oracle) < 1e-12);
  CHECK(std::abs(symmetric_chamfer(p, g) / d - oracle) < 1e-12);

  // Scaling both meshes and the diameter together leaves the value unchanged.
  const Sim3Pose grow(Rotation::identity(), Eigen::Vector3d::Zero(), 3.0);
  const double scaled =
      chamfer_normalized(transformed(rotated, grow), transformed(box, grow), 3.0 * d, 2000, 4);
  CHECK(std::abs(scaled - chamfer_normalized(rotated, box, d, 2000, 4)) < 1e-9);
  CHECK_ERROR_KIND(chamfer_normalized(box, box, 0.0, 10, 1), ErrorKind::NonPositiveDiameter);
}

TEST_CASE("occlusion fraction and bins") {
  BinaryMask amodal(10, 10, true);
  CHECK(occlusion_fraction(amodal, amodal) == 0.0);
  CHECK(occlusion_fraction(BinaryMask(10, 10), amodal) == 1.0);
  BinaryMask visible(10, 10);
  for (int i = 0; i < 70; ++i) visible.data[i] = 1;
  CHECK(std::abs(occlusion_fraction(visible, amodal) - 0.30) < 1e-15);
  CHECK_ERROR_KIND(occlusion_fraction(visible, BinaryMask(10, 10)), ErrorKind::MaskInconsistency);
  CHECK_ERROR_KIND(occlusion_fraction(BinaryMask(10, 10), BinaryMask(10, 10)), ErrorKind::EmptyAmodal);

  CHECK(occlusion_bin(0.0) == OcclusionBin::Visible);
  CHECK(occlusion_bin(0.0299) == OcclusionBin::Visible);
  CHECK(occlusion_bin(0.03) == OcclusionBin::Low);
  CHECK(occlusion_bin(0.1999) == OcclusionBin::Low);
  CHECK(occlusion_bin(0.20) == OcclusionBin::Medium);
  CHECK(occlusion_bin(0.25) == OcclusionBin::Medium);
  CHECK(occlusion_bin(0.40) == OcclusionBin::High);
  CHECK(occlusion_bin(0.70) == OcclusionBin::High);
  CHECK(occlusion_bin(0.7001) == OcclusionBin::OutOfRange);
  CHECK(occlusion_bin(0.85) == OcclusionBin::OutOfRange);
  CHECK(std::string(occlusion_bin_label(OcclusionBin::Medium)) == "20-40%");
}
