#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "shapepose/icp.hpp"
#include "shapepose/mesh.hpp"
#include "shapepose/metrics.hpp"
#include "shapepose/pointmap.hpp"

namespace shapepose {

constexpr double kDefaultTrim = 0.10;

struct AlignmentScore {
  /// Trimmed mean pointmap-to-mesh distance, meters.
  double value = 0.0;
  double trim = kDefaultTrim;
  /// Distances averaged after trimming.
  std::size_t points_used = 0;
};

/// A predicted object pose in the normalized frame of one view, together with
/// that view's pointmap normalization.
struct PoseCandidate {
  Sim3Pose pose;
  int view = 0;
  ObjectNormalization normalization;

  /// Object -> metric camera frame of the candidate's view.
  Sim3Pose camera_from_object() const { return sim3_compose(normalization.to_metric(), pose); }
};

/// Trimmed mean of the one-directional distances from every valid pointmap
/// point (metric camera frame) to the posed mesh samples.
AlignmentScore alignment_score_points(std::span<const Eigen::Vector3d> posed_samples,
                                      const Pointmap& pointmap_obj, double trim = kDefaultTrim);

AlignmentScore alignment_score(const TriMesh& mesh, const PoseCandidate& cand,
                               const Pointmap& pointmap_obj, double trim = kDefaultTrim,
                               std::size_t n = kDefaultSurfaceSamples,
                               std::uint64_t seed = kDefaultSampleSeed);

struct Selection {
  std::size_t index = 0;
  std::vector<double> scores;
};

/// Ties resolve to the lowest index.
std::size_t argmin_first(std::span<const double> values);

/// Each candidate is scored only against pointmaps[candidate.view].
Selection select_pose_single_view(const TriMesh& mesh, std::span<const PoseCandidate> candidates,
                                  std::span<const Pointmap> pointmaps, double trim = kDefaultTrim,
                                  std::size_t n = kDefaultSurfaceSamples,
                                  std::uint64_t seed = kDefaultSampleSeed);

/// Each candidate is scored against every view's pointmap after carrying the
/// posed mesh into that camera with the relative camera transform; the
/// per-candidate score is the mean over views. camera_poses[v] is world-from-camera.
Selection select_pose_cross_view(const TriMesh& mesh, std::span<const PoseCandidate> candidates,
                                 std::span<const Pointmap> pointmaps,
                                 std::span<const RigidTransform> camera_poses,
                                 double trim = kDefaultTrim,
                                 std::size_t n = kDefaultSurfaceSamples,
                                 std::uint64_t seed = kDefaultSampleSeed);

/// Camera j from camera i: inverse(world_from_j) * world_from_i.
RigidTransform relative_camera(const RigidTransform& world_from_i,
                               const RigidTransform& world_from_j);

struct GeneratedSample {
  TriMesh mesh;
  PoseCandidate candidate;
};

/// Picks the generated sample whose posed mesh best explains the pointmap.
Selection select_sample(std::span<const GeneratedSample> samples, const Pointmap& pointmap_obj,
                        double trim = kDefaultTrim, std::size_t n = kDefaultSurfaceSamples,
                        std::uint64_t seed = kDefaultSampleSeed);

enum class OracleCriterion { AddSb, Chamfer };

struct CandidateMetrics {
  double add_sb = 0.0;
  double chamfer = 0.0;
};

/// Argmin of the requested ground-truth metric.
std::size_t oracle_select(std::span<const CandidateMetrics> records, OracleCriterion criterion);

}  // namespace shapepose
