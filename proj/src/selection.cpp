#include "shapepose/selection.hpp"

#include <cmath>

#include "shapepose/errors.hpp"
#include "shapepose/kdtree.hpp"
#include "shapepose/robust_stats.hpp"

namespace shapepose {

AlignmentScore alignment_score_points(std::span<const Eigen::Vector3d> posed_samples,
                                      const Pointmap& pointmap_obj, double trim) {
  if (!(trim >= 0.0 && trim < 0.5)) {
    throw Error(ErrorKind::DegenerateInput, "trim fraction must lie in [0, 0.5)");
  }
  const std::size_t valid = pointmap_obj.valid_count();
  if (valid < 10) {
    throw Error(ErrorKind::TooFewPoints,
                "alignment needs 10 valid pointmap points, got " + std::to_string(valid));
  }
  const KdTree tree(posed_samples);
  std::vector<double> dist;
  dist.reserve(valid);
  for (std::size_t i = 0; i < pointmap_obj.points.size(); ++i) {
    if (!pointmap_obj.valid[i]) continue;
    dist.push_back(std::sqrt(tree.nearest(pointmap_obj.points[i]).squared_distance));
  }
  const auto tm = stats::upper_trimmed_mean(std::move(dist), trim);
  return {tm.value, trim, tm.kept};
}

AlignmentScore alignment_score(const TriMesh& mesh, const PoseCandidate& cand,
                               const Pointmap& pointmap_obj, double trim, std::size_t n,
                               std::uint64_t seed) {
  const PointList samples =
      sim3_apply(cand.camera_from_object(), sample_surface(mesh, n, seed).points);
  return alignment_score_points(samples, pointmap_obj, trim);
}

std::size_t argmin_first(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] < values[best]) best = i;
  }
  return best;
}

Selection select_pose_single_view(const TriMesh& mesh, std::span<const PoseCandidate> candidates,
                                  std::span<const Pointmap> pointmaps, double trim, std::size_t n,
                                  std::uint64_t seed) {
  if (candidates.empty()) throw Error(ErrorKind::DegenerateInput, "no pose candidates");
  const PointList samples = sample_surface(mesh, n, seed).points;
  Selection sel;
  for (const auto& c : candidates) {
    if (c.view < 0 || static_cast<std::size_t>(c.view) >= pointmaps.size()) {
      throw Error(ErrorKind::DegenerateInput, "candidate view has no pointmap");
    }
    const PointList posed = sim3_apply(c.camera_from_object(), samples);
    sel.scores.push_back(alignment_score_points(posed, pointmaps[c.view], trim).value);
  }
  sel.index = argmin_first(sel.scores);
  return sel;
}

RigidTransform relative_camera(const RigidTransform& world_from_i,
                               const RigidTransform& world_from_j) {
  return world_from_j.inverse() * world_from_i;
}

Selection select_pose_cross_view(const TriMesh& mesh, std::span<const PoseCandidate> candidates,
                                 std::span<const Pointmap> pointmaps,
                                 std::span<const RigidTransform> camera_poses, double trim,
                                 std::size_t n, std::uint64_t seed) {
  if (candidates.empty()) throw Error(ErrorKind::DegenerateInput, "no pose candidates");
  if (camera_poses.size() < pointmaps.size()) {
    throw Error(ErrorKind::MissingCameraPose,
                std::to_string(pointmaps.size()) + " views but " +
                    std::to_string(camera_poses.size()) + " camera poses");
  }
  const PointList samples = sample_surface(mesh, n, seed).points;
  Selection sel;
  for (const auto& c : candidates) {
    if (c.view < 0 || static_cast<std::size_t>(c.view) >= pointmaps.size()) {
      throw Error(ErrorKind::DegenerateInput, "candidate view has no pointmap");
    }
    const PointList in_own = sim3_apply(c.camera_from_object(), samples);
    double total = 0.0;
    for (std::size_t v = 0; v < pointmaps.size(); ++v) {
      if (static_cast<int>(v) == c.view) {
        total += alignment_score_points(in_own, pointmaps[v], trim).value;
        continue;
      }
      const RigidTransform rel = relative_camera(camera_poses[c.view], camera_poses[v]);
      total += alignment_score_points(rel.apply(in_own), pointmaps[v], trim).value;
    }
    sel.scores.push_back(total / static_cast<double>(pointmaps.size()));
  }
  sel.index = argmin_first(sel.scores);
  return sel;
}

Selection select_sample(std::span<const GeneratedSample> samples, const Pointmap& pointmap_obj,
                        double trim, std::size_t n, std::uint64_t seed) {
  if (samples.empty()) throw Error(ErrorKind::DegenerateInput, "no generated samples");
  Selection sel;
  for (const auto& s : samples) {
    sel.scores.push_back(alignment_score(s.mesh, s.candidate, pointmap_obj, trim, n, seed).value);
  }
  sel.index = argmin_first(sel.scores);
  return sel;
}

std::size_t oracle_select(std::span<const CandidateMetrics> records, OracleCriterion criterion) {
  if (records.empty()) throw Error(ErrorKind::DegenerateInput, "no candidates for oracle");
  std::vector<double> v;
  v.reserve(records.size());
  for (const auto& r : records) {
    v.push_back(criterion == OracleCriterion::AddSb ? r.add_sb : r.chamfer);
  }
  return argmin_first(v);
}

}  // namespace shapepose
