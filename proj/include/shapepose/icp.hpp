#pragma once

#include <span>
#include <vector>

#include "shapepose/pose.hpp"

namespace shapepose {

/// x -> R x + t, meters.
struct RigidTransform {
  Rotation rotation;
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Eigen::Vector3d apply(const Eigen::Vector3d& x) const { return rotation * x + translation; }
  PointList apply(std::span<const Eigen::Vector3d> pts) const;
  /// (a * b).apply(x) == a.apply(b.apply(x))
  RigidTransform operator*(const RigidTransform& b) const;
  RigidTransform inverse() const;
  Sim3Pose as_sim3() const { return Sim3Pose(rotation, translation, 1.0); }
};

/// Least-squares rigid transform mapping src[i] onto dst[i] (Kabsch with
/// determinant correction). Throws DegenerateGeometry for collinear src.
RigidTransform procrustes(std::span<const Eigen::Vector3d> src, std::span<const Eigen::Vector3d> dst);

/// Throws DegenerateGeometry unless the points span a plane (>= 3 non-collinear).
void require_non_collinear(std::span<const Eigen::Vector3d> pts, const char* what);

struct IcpParams {
  int max_iters = 60;
  double tol = 1e-6;
};

struct IcpResult {
  RigidTransform transform;
  int iterations = 0;
  bool converged = false;
  /// RMS nearest-neighbor distance measured at the start of every iteration
  /// plus one final entry after the last update.
  std::vector<double> rms_history;
};

/// Point-to-point ICP from the identity. Non-convergence is not an error; the
/// best-effort transform is returned with converged == false.
IcpResult icp_align(std::span<const Eigen::Vector3d> src, std::span<const Eigen::Vector3d> dst,
                    const IcpParams& params = {});

}  // namespace shapepose
