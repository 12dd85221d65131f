#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "shapepose/icp.hpp"
#include "shapepose/ingest.hpp"
#include "shapepose/report.hpp"

namespace shapepose {

struct RunConfig {
  std::filesystem::path dataset_root;
  std::filesystem::path pred_root;
  /// Optional `scene frame` list; every frame of every scene when empty.
  std::filesystem::path frames_file;
  std::string split = "test";
  bool depth_scale_in_mm = false;
  std::size_t samples = kDefaultSurfaceSamples;
  std::uint64_t seed = kDefaultSampleSeed;
  IcpParams icp;
  std::vector<double> thresholds{0.10, 0.05};
  double dre_threshold = 0.05;
  double trim = kDefaultTrim;
  int workers = 1;
  std::filesystem::path out;
  /// Rows with ADD-SB at or above this value (meters) are left out of aggregates.
  std::optional<double> outlier_cap;

  /// Throws InvalidConfig when a field is out of range.
  void validate() const;
};

/// Sampling seed for one instance, a pure function of its identity, so that
/// the schedule of a worker pool never changes a result.
std::uint64_t instance_seed(std::uint64_t global_seed, int scene_id, int frame_id, int gt_index);

/// Runs fn(i) for i in [0, count) on up to `workers` threads. Exceptions from
/// fn propagate after all workers have joined.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

struct CandidateEvaluation {
  double add_sb = 0.0;
  double gt_diameter = 0.0;
  double pred_diameter = 0.0;
  double cd_norm = 0.0;
};

/// Metric suite for one posed prediction against one posed GT mesh: ADD-SB on
/// same-seed surface samples, diameters of the posed samples and ICP-aligned
/// normalized Chamfer of the posed meshes.
CandidateEvaluation evaluate_candidate(const TriMesh& pred_mesh, const Sim3Pose& pred_pose,
                                       const TriMesh& gt_mesh, const Sim3Pose& gt_pose,
                                       std::size_t n, std::uint64_t seed, const IcpParams& icp);

/// Masked, backprojected pointmap of one GT instance using its eroded visible mask.
Pointmap instance_pointmap(const SceneFrame& frame, std::size_t gt_index);

/// Per-instance metrics over every GT instance of the selected frames. Instance
/// failures become error rows; only an unusable configuration throws.
EvalReport run_eval(const RunConfig& cfg);

enum class SelectionMode { SingleView, CrossView, MultiSample, Oracle };

SelectionMode parse_selection_mode(const std::string& s);
const char* to_string(SelectionMode m);

/// First-candidate baseline, selected candidate and GT oracle side by side.
SelectionReport run_selection_study(const RunConfig& cfg, SelectionMode mode);

/// Occlusion fraction and bin of every GT instance; needs no predictions.
OcclusionReport run_occlusion_report(const RunConfig& cfg);

}  // namespace shapepose
