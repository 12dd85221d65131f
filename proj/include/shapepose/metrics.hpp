#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "shapepose/icp.hpp"
#include "shapepose/mesh.hpp"
#include "shapepose/pointmap.hpp"

namespace shapepose {

constexpr std::size_t kDefaultSurfaceSamples = 10000;
constexpr std::uint64_t kDefaultSampleSeed = 20250;

/// Maximum pairwise distance, exact. Uses a radius-sorted pruned pair scan:
/// pairs whose radii about the centroid cannot beat the best pair are skipped.
double diameter(std::span<const Eigen::Vector3d> pts);

/// Mean over a of the exact nearest-neighbor distance into b.
double add_s_directional(std::span<const Eigen::Vector3d> a, std::span<const Eigen::Vector3d> b);

/// Mean of the two directional terms on already posed point sets.
double add_sb_points(std::span<const Eigen::Vector3d> pred, std::span<const Eigen::Vector3d> gt);

/// Samples both meshes with the same seed, poses them and symmetrizes ADD-S.
double add_sb(const TriMesh& pred_mesh, const Sim3Pose& pred_pose, const TriMesh& gt_mesh,
              const Sim3Pose& gt_pose, std::size_t n = kDefaultSurfaceSamples,
              std::uint64_t seed = kDefaultSampleSeed);

struct AddSbSample {
  double add_sb = 0.0;
  double gt_diameter = 0.0;
};

/// Fraction of instances with add_sb < threshold_fraction * gt_diameter.
double add_sb_recall(std::span<const AddSbSample> values, double threshold_fraction);

/// |d_pred - d_gt| / d_gt
double dre(double d_pred, double d_gt);
/// Fraction of errors strictly below tau.
double dre_recall(std::span<const double> errors, double tau);

/// Symmetric Chamfer: mean of the two directional mean NN distances.
double symmetric_chamfer(std::span<const Eigen::Vector3d> a, std::span<const Eigen::Vector3d> b);

/// Samples both (already posed) meshes, rigidly aligns pred onto gt with ICP
/// (skipped when icp.max_iters == 0), and divides the symmetric Chamfer by gt_diameter.
double chamfer_normalized(const TriMesh& pred, const TriMesh& gt, double gt_diameter,
                          std::size_t n = kDefaultSurfaceSamples,
                          std::uint64_t seed = kDefaultSampleSeed, const IcpParams& icp = {});

/// (|amodal| - |visible|) / |amodal|
double occlusion_fraction(const BinaryMask& visible, const BinaryMask& amodal);

enum class OcclusionBin { Visible = 0, Low = 1, Medium = 2, High = 3, OutOfRange = 4 };

/// [0, 0.03) [0.03, 0.20) [0.20, 0.40) [0.40, 0.70]; anything above is OutOfRange.
OcclusionBin occlusion_bin(double f);
const char* occlusion_bin_label(OcclusionBin b);

}  // namespace shapepose
