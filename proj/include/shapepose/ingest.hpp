#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "shapepose/icp.hpp"
#include "shapepose/mesh.hpp"
#include "shapepose/pointmap.hpp"
#include "shapepose/selection.hpp"

namespace shapepose {

/// Numeric fields exactly as stored in scene_gt (rotation row-major, translation mm).
struct BopPoseRecord {
  std::array<double, 9> cam_R_m2c{};
  std::array<double, 3> cam_t_m2c{};
  int obj_id = 0;
};

struct GtInstance {
  int obj_id = 0;
  /// Object -> camera, meters, scale 1.
  Sim3Pose pose;
  BopPoseRecord record;
  BinaryMask visible;
  /// Absent when the dataset ships no amodal masks.
  std::optional<BinaryMask> amodal;
};

struct SceneFrame {
  int scene_id = 0;
  int frame_id = 0;
  CameraIntrinsics intrinsics;
  /// Meters per raw depth unit.
  double depth_scale = 0.0;
  DepthImage depth;
  std::vector<GtInstance> instances;
  /// Present when scene_camera carries cam_R_w2c / cam_t_w2c.
  std::optional<RigidTransform> world_from_camera;
};

struct BopOptions {
  std::string split = "test";
  /// When true, depth_scale is read as millimeters per raw unit (the upstream
  /// BOP convention) and converted to meters.
  bool depth_scale_in_mm = false;
  /// Restricts loading to these frame ids; empty loads every frame.
  std::set<int> frames;
};

std::filesystem::path bop_scene_dir(const std::filesystem::path& root, int scene_id,
                                    const std::string& split);

std::vector<SceneFrame> load_bop_scene(const std::filesystem::path& root, int scene_id,
                                       const BopOptions& options = {});

/// Scene ids present under <root>/<split>, ascending.
std::vector<int> list_bop_scenes(const std::filesystem::path& root, const std::string& split);

/// <root>/models/obj_<id>.ply, converted from millimeters to meters.
TriMesh load_bop_model(const std::filesystem::path& root, int obj_id);

/// Re-serializes the stored scene_gt record at full precision.
std::string format_bop_pose_record(const BopPoseRecord& r);

/// A pixel stays set only when its whole 3x3 neighborhood is set; pixels
/// outside the image count as unset.
BinaryMask erode_mask(const BinaryMask& m);

struct FrameKey {
  int scene_id = 0;
  int frame_id = 0;
  auto operator<=>(const FrameKey&) const = default;
};

/// One `scene_id frame_id` pair per line (comma or whitespace separated, # comments).
std::vector<FrameKey> read_frame_list(const std::filesystem::path& path);

struct PredictedPose {
  int view_id = 0;
  /// Frame this view was captured in; defaults to the bundle's frame.
  int frame_id = 0;
  /// GT instance index inside that frame; defaults to the bundle's.
  int gt_index = 0;
  PoseCandidate candidate;
};

struct PredictionBundle {
  std::string id;
  int scene_id = 0;
  int frame_id = 0;
  int gt_index = 0;
  std::optional<int> seed_id;
  TriMesh mesh;
  /// Sorted by view_id; candidate.view is the position in this list.
  std::vector<PredictedPose> poses;
};

PredictionBundle load_prediction_bundle(const std::filesystem::path& dir);
/// Every immediate subdirectory holding a poses.json, in name order.
std::vector<PredictionBundle> load_predictions(const std::filesystem::path& root);

}  // namespace shapepose
