#pragma once

// Synthetic scenes, BOP-layout writers and brute-force oracles shared by the
// unit, integration and acceptance tests.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "shapepose/icp.hpp"
#include "shapepose/mesh.hpp"
#include "shapepose/pointmap.hpp"
#include "shapepose/pose.hpp"
#include "shapepose/report.hpp"
#include "shapepose/selection.hpp"
#include "shapepose/voxel.hpp"

namespace shapepose::testing {

namespace fs = std::filesystem;

// ---- random geometry -------------------------------------------------------

Rotation random_rotation(std::mt19937_64& rng);
/// Rotation by exactly `angle_rad` about a random axis.
Rotation random_rotation_by(std::mt19937_64& rng, double angle_rad);
Eigen::Vector3d random_unit_vector(std::mt19937_64& rng);
PointList random_cloud(std::mt19937_64& rng, std::size_t n, double half_extent);

/// `count` distinct voxels (raster order) with uniform random features.
SparseFeatures random_sparse_features(std::mt19937_64& rng, int resolution, std::size_t count,
                                      int channels);
/// Grid with each voxel set independently with probability p.
OccupancyGrid random_grid(std::mt19937_64& rng, int resolution, double p);

// ---- brute-force oracles ---------------------------------------------------

double brute_nn_distance(const Eigen::Vector3d& q, std::span<const Eigen::Vector3d> pts);
double brute_add_s(std::span<const Eigen::Vector3d> a, std::span<const Eigen::Vector3d> b);
double brute_diameter(std::span<const Eigen::Vector3d> pts);
/// Percentile by full sort with linear interpolation at rank alpha·(K−1).
double sorted_percentile(std::vector<double> values, double alpha);
/// Frobenius-nearest rotation to `m` by coarse-to-fine grid search over
/// axis-angle perturbations of a Gram–Schmidt starting point.
Eigen::Matrix3d grid_search_nearest_rotation(const Eigen::Matrix3d& m);
/// Trimmed mean computed by sorting and dropping ⌈trim·K⌉ largest values.
double sorted_trimmed_mean(std::vector<double> values, double trim);

/// Pointmap of width |pts| and height 1 with every pixel valid.
Pointmap pointmap_from_points(const PointList& pts);

// ---- rendering -------------------------------------------------------------

CameraIntrinsics test_camera(int width = 320, int height = 240, double focal = 400.0);

struct PosedMesh {
  const TriMesh* mesh = nullptr;
  Sim3Pose camera_from_object;
};

struct Rendering {
  DepthImage depth;
  std::vector<BinaryMask> visible;
  std::vector<BinaryMask> amodal;
};

/// Ray-casts every pixel centre (u, v) along ((u−cx)/fx, (v−cy)/fy, 1), the
/// exact inverse of backprojection, so rendered depth lies on the surfaces.
Rendering render(const CameraIntrinsics& k, std::span<const PosedMesh> objects);

/// Backprojected pointmap of object `index`, masked by its eroded visible mask.
Pointmap rendered_pointmap(const CameraIntrinsics& k, const Rendering& r, std::size_t index);

/// Thin plate whose normal is the local z axis.
TriMesh make_plate(double width, double height, double thickness = 0.001);

// ---- selection scenes ------------------------------------------------------

/// A posed box observed, noise-free, from one or more cameras.
struct SelectionScene {
  TriMesh mesh;
  CameraIntrinsics camera;
  std::vector<RigidTransform> world_from_camera;
  std::vector<Sim3Pose> camera_from_object;  // GT per view
  std::vector<Pointmap> pointmaps;           // masked, metric, per view
};

SelectionScene make_selection_scene(std::mt19937_64& rng, int views);

/// Candidate for `view` whose metric pose is `camera_from_object`, stored in
/// the normalized frame of that view's pointmap.
PoseCandidate make_candidate(const SelectionScene& s, int view, const Sim3Pose& camera_from_object);

/// Rotates by `angle_rad` about a random axis through the object origin and
/// shifts by `distance` along a random direction.
Sim3Pose perturb_pose(std::mt19937_64& rng, const Sim3Pose& p, double angle_rad, double distance);

// ---- BOP writer ------------------------------------------------------------

struct FixtureInstance {
  int obj_id = 1;
  Sim3Pose pose;  // camera_from_object, meters
};

struct FixtureFrame {
  int frame_id = 0;
  std::vector<FixtureInstance> instances;
  std::optional<RigidTransform> world_from_camera;
};

struct FixtureScene {
  int scene_id = 0;
  std::vector<FixtureFrame> frames;
};

struct FixtureDataset {
  CameraIntrinsics camera = test_camera();
  /// Meters per raw depth unit.
  double depth_scale = 1e-4;
  std::map<int, TriMesh> models;  // meters
  std::vector<FixtureScene> scenes;
  bool write_amodal = true;
  std::string split = "test";
};

/// Writes models (millimeters), scene_camera.json, scene_gt.json, depth and
/// mask PNGs under `root`.
void write_bop_dataset(const fs::path& root, const FixtureDataset& d);

struct FixturePose {
  int view_id = 0;
  int frame_id = 0;
  int gt_index = 0;
  Sim3Pose camera_from_object;
  /// When set the pose is stored in this normalized frame.
  std::optional<ObjectNormalization> normalization;
};

struct FixtureBundle {
  std::string id;
  int scene_id = 0;
  int frame_id = 0;
  int gt_index = 0;
  std::optional<int> seed_id;
  TriMesh mesh;
  std::vector<FixturePose> poses;
};

void write_prediction_bundle(const fs::path& pred_root, const FixtureBundle& b);

/// The three-scene plate dataset used by the end-to-end tests: two frames per
/// scene, two partially overlapping plates per frame, camera poses included.
FixtureDataset plate_dataset();

/// One bundle per GT instance, each a copy of the GT model at its GT pose
/// translated by `offset_fraction`·diameter along the plate normal.
void write_gt_predictions(const fs::path& pred_root, const FixtureDataset& d,
                          double offset_fraction = 0.0);

/// Exact diameter of a model's vertices.
double model_diameter(const TriMesh& m);

// ---- files -----------------------------------------------------------------

/// Fresh empty directory under the system temporary directory.
fs::path fresh_dir(const std::string& name);
std::string read_file(const fs::path& p);

/// A small fixed evaluation report exercising every column and aggregate kind.
EvalReport golden_eval_report();
SelectionReport golden_selection_report();
OcclusionReport golden_occlusion_report();

}  // namespace shapepose::testing
