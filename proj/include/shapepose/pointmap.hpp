#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "shapepose/pose.hpp"

namespace shapepose {

/// Pinhole intrinsics in pixels.
struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  /// Throws DegenerateInput when the invariants (positive focal lengths,
  /// principal point inside the image) do not hold.
  void validate() const;
};

/// Row-major depth in meters; pixels with raw depth 0 are invalid.
struct DepthImage {
  int width = 0;
  int height = 0;
  std::vector<double> depth;
  std::vector<std::uint8_t> valid;

  DepthImage() = default;
  DepthImage(int w, int h);
  std::size_t index(int u, int v) const { return static_cast<std::size_t>(v) * width + u; }
};

struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  BinaryMask() = default;
  BinaryMask(int w, int h, bool fill = false);

  bool at(int u, int v) const { return data[static_cast<std::size_t>(v) * width + u] != 0; }
  void set(int u, int v, bool on) { data[static_cast<std::size_t>(v) * width + u] = on ? 1 : 0; }
  std::size_t count() const;
};

struct Pointmap {
  int width = 0;
  int height = 0;
  std::vector<Eigen::Vector3d> points;
  std::vector<std::uint8_t> valid;

  Pointmap() = default;
  Pointmap(int w, int h);

  std::size_t valid_count() const;
  /// Valid points in row-major order.
  PointList valid_points() const;
};

/// Metric center and scale of the observed object points.
struct ObjectNormalization {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double scale = 1.0;

  /// Maps normalized-frame coordinates back to the metric camera frame.
  Sim3Pose to_metric() const;
};

Pointmap backproject(const DepthImage& depth, const CameraIntrinsics& k);
Pointmap mask_pointmap(const Pointmap& p, const BinaryMask& m);

/// Center = component-wise median; scale = q95 - q05 of the distances to the
/// center. Needs at least 20 valid points.
ObjectNormalization robust_normalization(const Pointmap& p_obj);
Pointmap normalize_pointmap(const Pointmap& p_obj, const ObjectNormalization& n);

/// Half-open pixel rectangle [u0, u1) x [v0, v1).
struct CropBox {
  int u0 = 0;
  int v0 = 0;
  int u1 = 0;
  int v1 = 0;

  bool contains(const CropBox& other) const {
    return u0 <= other.u0 && v0 <= other.v0 && u1 >= other.u1 && v1 >= other.v1;
  }
  bool operator==(const CropBox&) const = default;
};

/// Tight mask bounds grown on every side by padding_fraction times the box
/// extent along that axis, then clamped to the image.
CropBox dynamic_crop_box(const BinaryMask& m, double padding_fraction);

}  // namespace shapepose
