#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace shapepose {

using PointList = std::vector<Eigen::Vector3d>;

/// Unit quaternion rotation, canonicalized so that w >= 0.
class Rotation {
public:
  Rotation() = default;
  explicit Rotation(const Eigen::Quaterniond& q);

  static Rotation identity() { return Rotation(); }
  /// The matrix must be a proper rotation; no projection is applied.
  static Rotation from_matrix(const Eigen::Matrix3d& m);
  static Rotation from_axis_angle(const Eigen::Vector3d& axis, double angle_rad);

  const Eigen::Quaterniond& quaternion() const { return q_; }
  Eigen::Matrix3d matrix() const { return q_.toRotationMatrix(); }
  Rotation inverse() const { return Rotation(q_.conjugate()); }
  Eigen::Vector3d operator*(const Eigen::Vector3d& v) const { return q_ * v; }
  Rotation operator*(const Rotation& other) const { return Rotation(q_ * other.q_); }

  /// Geodesic angle between two rotations in radians.
  double angular_distance(const Rotation& other) const;

private:
  Eigen::Quaterniond q_ = Eigen::Quaterniond::Identity();
};

/// First two matrix columns, column-major: (c1x, c1y, c1z, c2x, c2y, c2z).
using Rotation6D = std::array<double, 6>;
/// Full matrix, row-major.
using Rotation9D = std::array<double, 9>;

Rotation rot_from_6d(const Rotation6D& r6);
Rotation6D rot_to_6d(const Rotation& r);
/// Nearest rotation in Frobenius norm (SVD projection with determinant fix).
Rotation rot_from_9d(const Rotation9D& r9);
Rotation9D rot_to_9d(const Rotation& r);

/// x -> scale * (R x) + t
struct Sim3Pose {
  Rotation rotation;
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  double scale = 1.0;

  Sim3Pose() = default;
  Sim3Pose(const Rotation& r, const Eigen::Vector3d& t, double s);

  static Sim3Pose identity() { return Sim3Pose(); }

  Eigen::Vector3d apply(const Eigen::Vector3d& x) const {
    return scale * (rotation * x) + translation;
  }
};

PointList sim3_apply(const Sim3Pose& p, std::span<const Eigen::Vector3d> pts);
/// apply(compose(a, b), x) == apply(a, apply(b, x))
Sim3Pose sim3_compose(const Sim3Pose& a, const Sim3Pose& b);
Sim3Pose sim3_inverse(const Sim3Pose& p);

enum class RotationLayout { SixD = 6, NineD = 9 };

inline std::size_t rotation_width(RotationLayout layout) {
  return static_cast<std::size_t>(layout);
}

/// Pose parameter vector layout: (rho..., t_x, t_y, t_z, s).
std::vector<double> pose_to_params(const Sim3Pose& p, RotationLayout layout);
Sim3Pose pose_from_params(std::span<const double> params, RotationLayout layout);

/// Component-wise dataset statistics used for z-score normalization.
struct PoseStats {
  RotationLayout layout = RotationLayout::SixD;
  std::vector<double> mean;
  std::vector<double> stddev;

  std::size_t width() const { return rotation_width(layout) + 4; }
};

std::vector<double> pose_normalize(std::span<const double> params, const PoseStats& stats);
std::vector<double> pose_denormalize(std::span<const double> normalized, const PoseStats& stats);

/// Mean and population (1/N) standard deviation per component.
PoseStats pose_stats_fit(std::span<const std::vector<double>> samples, RotationLayout layout);

/// Flat key-value text: a `layout` line followed by `<name> <mean> <std>` lines.
void write_pose_stats(std::ostream& os, const PoseStats& stats);
PoseStats read_pose_stats(std::istream& is);
PoseStats load_pose_stats(const std::string& path);

}  // namespace shapepose
